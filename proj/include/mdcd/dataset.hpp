#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "mdcd/errors.hpp"

namespace mdcd {

enum class ColumnKind { continuous, discrete };

struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::continuous;
};

/// One domain's rows, stored column-major: columns[c][r] is row r of column c.
struct DomainBlock {
  std::size_t n_rows = 0;
  std::vector<std::vector<double>> columns;
};

/// Joint samples collected in m >= 1 domains over a shared column schema.
/// Domain labels are arbitrary integers remapped to blocks 0..m-1 by
/// ascending label; the originals are kept for round-tripping.
/// Immutable after construction; safe to read concurrently.
class MultiDomainDataset {
 public:
  MultiDomainDataset(std::vector<Column> columns, std::vector<DomainBlock> blocks,
                     std::vector<long long> domain_labels = {});

  std::size_t m() const { return blocks_.size(); }
  std::size_t column_count() const { return columns_.size(); }
  const std::vector<Column>& columns() const { return columns_; }
  const Column& column(std::size_t c) const { return columns_[c]; }

  /// Index of a named column; throws UnknownColumn.
  std::size_t column_index(const std::string& name) const;
  bool has_column(const std::string& name) const;

  const DomainBlock& block(std::size_t domain) const { return blocks_[domain]; }
  std::size_t rows_in(std::size_t domain) const { return blocks_[domain].n_rows; }
  std::size_t total_rows() const;

  const std::vector<long long>& domain_labels() const { return domain_labels_; }

 private:
  std::vector<Column> columns_;
  std::vector<DomainBlock> blocks_;
  std::vector<long long> domain_labels_;
};

/// Discrete iff every value is integral and the number of distinct values is
/// at most max_levels; continuous otherwise.
ColumnKind infer_column_kind(std::span<const double> values, int max_levels = 10);

struct CsvOptions {
  std::string domain_column = "domain";
  int max_levels = 10;
  /// Per-column kind overrides; these always win over inference.
  std::map<std::string, ColumnKind> kind_overrides;
};

/// Reads a UTF-8 comma-separated file with a header row. The domain column
/// must hold integer labels; all other columns are numeric. Rows are grouped
/// into blocks by ascending domain label.
MultiDomainDataset load_csv(const std::string& path, const CsvOptions& opts = {});

/// Canonical writer: domain column first, then the schema columns in order.
/// Continuous values are printed with 17 significant digits so a reload
/// reproduces them bit-exactly; discrete values are printed as integers.
void write_csv(const MultiDomainDataset& ds, const std::string& path,
               const std::string& domain_column = "domain");

/// Affine transform bookkeeping: original = z * scale + offset.
struct AffineParams {
  double offset = 0.0;
  double scale = 1.0;
  bool transformed = false;
};

struct StandardizeResult {
  MultiDomainDataset dataset;
  std::vector<AffineParams> params;  // aligned with the column schema
};

/// Shifts/scales each continuous column to pooled (across all domains) mean 0
/// and unit sample variance. Pooling is deliberate: per-domain standardization
/// would erase exactly the cross-domain density differences the profiles rely
/// on. Discrete columns pass through untouched.
StandardizeResult standardize(const MultiDomainDataset& ds);

/// Same, restricted to the named columns (others pass through untouched).
StandardizeResult standardize(const MultiDomainDataset& ds,
                              std::span<const std::string> only_columns);

/// Inverse of standardize for one column.
double unstandardize_value(double z, const AffineParams& p);

}  // namespace mdcd
