#include "mdcd/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace mdcd {

namespace {

bool is_integral_value(double v) {
  return std::isfinite(v) && std::floor(v) == v && std::abs(v) < 9.007199254740992e15;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  cells.push_back(cur);
  return cells;
}

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

bool parse_double(const std::string& cell, double& out) {
  const std::string t = trim(cell);
  if (t.empty()) return false;
  char* end = nullptr;
  out = std::strtod(t.c_str(), &end);
  return end == t.c_str() + t.size() && std::isfinite(out);
}

}  // namespace

MultiDomainDataset::MultiDomainDataset(std::vector<Column> columns,
                                       std::vector<DomainBlock> blocks,
                                       std::vector<long long> domain_labels)
    : columns_(std::move(columns)), blocks_(std::move(blocks)),
      domain_labels_(std::move(domain_labels)) {
  if (blocks_.empty()) throw Error("dataset needs at least one domain");
  if (columns_.empty()) throw Error("dataset needs at least one column");
  if (domain_labels_.empty()) {
    domain_labels_.resize(blocks_.size());
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      domain_labels_[i] = static_cast<long long>(i) + 1;
    }
  }
  if (domain_labels_.size() != blocks_.size()) {
    throw Error("domain label list does not match block count");
  }
  for (std::size_t e = 0; e < blocks_.size(); ++e) {
    const DomainBlock& b = blocks_[e];
    if (b.n_rows == 0) throw EmptyDomain(domain_labels_[e]);
    if (b.columns.size() != columns_.size()) {
      throw Error("domain block column count does not match schema");
    }
    for (std::size_t c = 0; c < columns_.size(); ++c) {
      if (b.columns[c].size() != b.n_rows) {
        throw Error("ragged column '" + columns_[c].name + "' in domain block");
      }
      for (double v : b.columns[c]) {
        if (!std::isfinite(v)) {
          throw Error("non-finite entry in column '" + columns_[c].name + "'");
        }
        if (columns_[c].kind == ColumnKind::discrete && !is_integral_value(v)) {
          throw Error("discrete column '" + columns_[c].name + "' holds a non-integer value");
        }
      }
    }
  }
}

std::size_t MultiDomainDataset::column_index(const std::string& name) const {
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    if (columns_[c].name == name) return c;
  }
  throw UnknownColumn(name);
}

bool MultiDomainDataset::has_column(const std::string& name) const {
  for (const Column& c : columns_) {
    if (c.name == name) return true;
  }
  return false;
}

std::size_t MultiDomainDataset::total_rows() const {
  std::size_t n = 0;
  for (const DomainBlock& b : blocks_) n += b.n_rows;
  return n;
}

ColumnKind infer_column_kind(std::span<const double> values, int max_levels) {
  if (values.empty()) throw Error("cannot infer kind of an empty column");
  std::set<double> levels;
  for (double v : values) {
    if (!is_integral_value(v)) return ColumnKind::continuous;
    levels.insert(v);
    if (levels.size() > static_cast<std::size_t>(max_levels)) {
      return ColumnKind::continuous;
    }
  }
  return ColumnKind::discrete;
}

MultiDomainDataset load_csv(const std::string& path, const CsvOptions& opts) {
  std::ifstream in(path);
  if (!in) throw MissingFile(path);

  std::string line;
  if (!std::getline(in, line)) throw Error("empty file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const std::vector<std::string> raw_header = split_line(line);
  std::vector<std::string> header;
  header.reserve(raw_header.size());
  for (const std::string& h : raw_header) header.push_back(trim(h));

  std::size_t domain_col = header.size();
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == opts.domain_column) domain_col = c;
  }
  if (domain_col == header.size()) throw UnknownColumn(opts.domain_column);

  std::vector<long long> labels;
  std::vector<std::vector<double>> rows;  // data columns only, row-major
  std::size_t row_no = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row_no;
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != header.size()) {
      throw MalformedRow(row_no, "expected " + std::to_string(header.size()) +
                                     " cells, found " + std::to_string(cells.size()));
    }
    std::vector<double> row;
    row.reserve(header.size() - 1);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double v;
      if (!parse_double(cells[c], v)) {
        throw MalformedRow(row_no, "non-numeric cell '" + cells[c] + "' in column '" +
                                       header[c] + "'");
      }
      if (c == domain_col) {
        if (!is_integral_value(v)) {
          throw MalformedRow(row_no, "domain label '" + cells[c] + "' is not an integer");
        }
        labels.push_back(static_cast<long long>(v));
      } else {
        row.push_back(v);
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error("no data rows in: " + path);

  std::vector<std::string> names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != domain_col) names.push_back(header[c]);
  }

  // Kinds inferred from the pooled column, so every block agrees.
  std::vector<Column> columns(names.size());
  std::vector<double> pooled(rows.size());
  for (std::size_t c = 0; c < names.size(); ++c) {
    columns[c].name = names[c];
    const auto it = opts.kind_overrides.find(names[c]);
    if (it != opts.kind_overrides.end()) {
      columns[c].kind = it->second;
    } else {
      for (std::size_t r = 0; r < rows.size(); ++r) pooled[r] = rows[r][c];
      columns[c].kind = infer_column_kind(pooled, opts.max_levels);
    }
  }

  std::vector<long long> distinct = labels;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  std::vector<DomainBlock> blocks(distinct.size());
  for (std::size_t e = 0; e < blocks.size(); ++e) {
    blocks[e].columns.assign(names.size(), {});
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto it = std::lower_bound(distinct.begin(), distinct.end(), labels[r]);
    const auto e = static_cast<std::size_t>(it - distinct.begin());
    blocks[e].n_rows += 1;
    for (std::size_t c = 0; c < names.size(); ++c) {
      blocks[e].columns[c].push_back(rows[r][c]);
    }
  }

  return MultiDomainDataset(std::move(columns), std::move(blocks), std::move(distinct));
}

void write_csv(const MultiDomainDataset& ds, const std::string& path,
               const std::string& domain_column) {
  std::ostringstream out;
  out << domain_column;
  for (const Column& c : ds.columns()) out << ',' << c.name;
  out << '\n';

  char buf[64];
  for (std::size_t e = 0; e < ds.m(); ++e) {
    const DomainBlock& b = ds.block(e);
    for (std::size_t r = 0; r < b.n_rows; ++r) {
      out << ds.domain_labels()[e];
      for (std::size_t c = 0; c < ds.column_count(); ++c) {
        const double v = b.columns[c][r];
        if (ds.column(c).kind == ColumnKind::discrete) {
          std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(v));
        } else {
          std::snprintf(buf, sizeof(buf), "%.17g", v);
        }
        out << ',' << buf;
      }
      out << '\n';
    }
  }

  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write: " + tmp);
    f << out.str();
  }
  std::filesystem::rename(tmp, path);
}

namespace {

StandardizeResult standardize_impl(const MultiDomainDataset& ds,
                                   const std::vector<bool>& touch) {
  std::vector<AffineParams> params(ds.column_count());
  std::vector<DomainBlock> blocks;
  blocks.reserve(ds.m());
  for (std::size_t e = 0; e < ds.m(); ++e) blocks.push_back(ds.block(e));

  const auto total = static_cast<double>(ds.total_rows());
  for (std::size_t c = 0; c < ds.column_count(); ++c) {
    if (!touch[c] || ds.column(c).kind == ColumnKind::discrete) continue;

    double mean = 0.0;
    for (std::size_t e = 0; e < ds.m(); ++e) {
      for (double v : ds.block(e).columns[c]) mean += v;
    }
    mean /= total;

    double ss = 0.0;
    for (std::size_t e = 0; e < ds.m(); ++e) {
      for (double v : ds.block(e).columns[c]) {
        const double d = v - mean;
        ss += d * d;
      }
    }
    const double var = total > 1.0 ? ss / (total - 1.0) : 0.0;
    if (!(var > 0.0)) throw ZeroVariance(ds.column(c).name);
    const double sd = std::sqrt(var);

    for (DomainBlock& b : blocks) {
      for (double& v : b.columns[c]) v = (v - mean) / sd;
    }
    params[c] = AffineParams{mean, sd, true};
  }

  std::vector<Column> cols = ds.columns();
  std::vector<long long> labels = ds.domain_labels();
  return StandardizeResult{MultiDomainDataset(std::move(cols), std::move(blocks), std::move(labels)),
                           std::move(params)};
}

}  // namespace

StandardizeResult standardize(const MultiDomainDataset& ds) {
  return standardize_impl(ds, std::vector<bool>(ds.column_count(), true));
}

StandardizeResult standardize(const MultiDomainDataset& ds,
                              std::span<const std::string> only_columns) {
  std::vector<bool> touch(ds.column_count(), false);
  for (const std::string& name : only_columns) touch[ds.column_index(name)] = true;
  return standardize_impl(ds, touch);
}

double unstandardize_value(double z, const AffineParams& p) {
  return p.transformed ? z * p.scale + p.offset : z;
}

}  // namespace mdcd
