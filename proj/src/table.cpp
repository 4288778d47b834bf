#include "table.hpp"

#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace stablab {

Table::Table(std::vector<std::string> columns, std::vector<bool> text_mask)
    : columns_(std::move(columns)), text_mask_(std::move(text_mask)) {
  if (text_mask_.empty()) text_mask_.assign(columns_.size(), false);
  if (text_mask_.size() != columns_.size())
    throw std::invalid_argument("Table: text mask length must match column count");
}

std::string Table::fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void Table::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns_.size())
    throw std::invalid_argument("Table: row has " + std::to_string(cells.size()) +
                                " cells, expected " + std::to_string(columns_.size()));
  rows_.push_back(std::move(cells));
}

void Table::add_row(const std::vector<double>& cells) {
  std::vector<std::string> out;
  out.reserve(cells.size());
  for (double v : cells) out.push_back(fmt(v));
  add_row(std::move(out));
}

void Table::meta(const std::string& key, double value) {
  meta_.push_back({key, fmt(value), false});
}

void Table::meta(const std::string& key, const std::string& value) {
  meta_.push_back({key, value, true});
}

double Table::cell_num(std::size_t i, std::size_t j) const {
  return std::strtod(cell(i, j).c_str(), nullptr);
}

double Table::meta_num(const std::string& key) const {
  for (const MetaEntry& e : meta_)
    if (e.key == key && !e.is_text) return std::strtod(e.value.c_str(), nullptr);
  throw std::invalid_argument("Table: no numeric metadata entry named " + key);
}

}  // namespace stablab
