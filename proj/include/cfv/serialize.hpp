#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cfv/cannings.hpp"
#include "cfv/metrics.hpp"
#include "cfv/partitions.hpp"
#include "cfv/trees.hpp"

namespace cfv {

// {"n": n, "d": [row-major], "v": [marks]}; "v" only for marked states.
std::string to_json(const DistanceMatrix& d);
std::string to_json(const MarkedDistanceMatrix& rv);
std::string to_json(const TreeState& s);
TreeState tree_state_from_json(const std::string& text);

// 1-based sorted lists of sorted lists
std::string to_json(const Blocks& blocks);

std::string to_json(const RelationCertificate& cert);
RelationCertificate certificate_from_json(const std::string& text);

// one CSV line per matrix row
void write_matrix_csv(std::ostream& os, const DistanceMatrix& d);
void write_observer_csv(std::ostream& os, const std::vector<ObserverRow>& rows);

}  // namespace cfv
