#pragma once

#include <string>
#include <vector>

namespace stablab {

// Tabular experiment result: named columns, rows of preformatted cells, and
// a flat list of metadata entries.  Numeric cells are rendered once, here,
// with 17 significant digits so every writer downstream round-trips exactly.
class Table {
public:
  Table() = default;
  explicit Table(std::vector<std::string> columns, std::vector<bool> text_mask = {});

  static std::string fmt(double v);

  void add_row(std::vector<std::string> cells);
  // convenience for all-numeric tables
  void add_row(const std::vector<double>& cells);

  void meta(const std::string& key, double value);
  void meta(const std::string& key, const std::string& value);

  std::size_t rows() const { return rows_.size(); }
  std::size_t cols() const { return columns_.size(); }
  const std::vector<std::string>& columns() const { return columns_; }
  bool text_col(std::size_t j) const { return text_mask_.at(j); }
  const std::string& cell(std::size_t i, std::size_t j) const { return rows_.at(i).at(j); }
  double cell_num(std::size_t i, std::size_t j) const;

  struct MetaEntry {
    std::string key;
    std::string value;
    bool is_text;
  };
  const std::vector<MetaEntry>& meta_entries() const { return meta_; }
  double meta_num(const std::string& key) const;  // throws when absent or text

private:
  std::vector<std::string> columns_;
  std::vector<bool> text_mask_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<MetaEntry> meta_;
};

}  // namespace stablab
