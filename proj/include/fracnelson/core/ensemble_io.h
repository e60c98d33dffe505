#pragma once

#include <iosfwd>
#include <string>

#include "fracnelson/core/path_ensemble.h"

namespace fracnelson::core {

/// Shortest round-trip text for a double (17 significant digits).
std::string format_double(double x);

/// Columns path_id,t,value[,dW]; dW on row k is the increment over [t_{k-1}, t_k]
/// and is empty on the first row of each path.
void write_csv(std::ostream& out, const PathEnsemble& e);
PathEnsemble read_csv(std::istream& in, const std::string& label = "csv");

/// "FNE1" binary: magic, u64 n_points, u64 n_paths, u8 has_driver, u32 label length,
/// label bytes, then grid, values and driver as little-endian doubles.
void write_binary(std::ostream& out, const PathEnsemble& e);
PathEnsemble read_binary(std::istream& in);

void save(const std::string& path, const PathEnsemble& e);
PathEnsemble load(const std::string& path);

}  // namespace fracnelson::core
