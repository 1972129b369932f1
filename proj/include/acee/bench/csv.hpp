#pragma once

#include <string>
#include <vector>

#include "acee/effects/dataset.hpp"

namespace acee::bench {

struct CsvSchema {
  std::vector<std::string> covariate_cols;  // empty: every remaining column
  std::string treatment_col = "d";
  std::string outcome_col = "y";
};

// Reads a headered CSV into a typed dataset. Treatment cells must be 0 or 1;
// parse failures report the offending row and column.
effects::ObservationalDataset ingest_csv(const std::string& path, const CsvSchema& schema);

// Fixed-order dataset writer: covariates, then d, then y.
void write_dataset_csv(const effects::ObservationalDataset& dataset, const std::string& path);

// Generic numeric table writer used for proxies and reports.
void write_matrix_csv(const numerics::Matrix& m, const std::vector<std::string>& header,
                      const std::string& path);

}  // namespace acee::bench
