#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "adjstab/core.hpp"
#include "adjstab/similarity.hpp"

namespace adjstab {

// File formats
//
//   similarity CSV  header row of p feature ids, then p rows of p values.
//                   A row may start with its feature id as a label.
//   ensemble file   "#universe: id1,id2,..." followed by one line per
//                   selected set, ids separated by commas. An empty line is
//                   an empty set.
//   data CSV        header row of p feature ids, then n rows of p values.
//
// Decimal point is '.', no grouping. Parse failures throw ParseError with
// "<source>:<line>: ..." in the message.

/// Shortest representation that reads back to the same double.
std::string format_double(double v);

SimilarityMatrix read_similarity_csv(std::istream& in, std::string_view source = "<stream>");
SimilarityMatrix load_similarity_csv(const std::filesystem::path& path);
void write_similarity_csv(std::ostream& out, const SimilarityMatrix& sim);

SelectionEnsemble read_ensemble(std::istream& in, std::string_view source = "<stream>");
SelectionEnsemble load_ensemble(const std::filesystem::path& path);
void write_ensemble(std::ostream& out, const SelectionEnsemble& ensemble);

DataMatrix read_data_csv(std::istream& in, std::string_view source = "<stream>");
DataMatrix load_data_csv(const std::filesystem::path& path);
void write_data_csv(std::ostream& out, const DataMatrix& data);

}  // namespace adjstab
