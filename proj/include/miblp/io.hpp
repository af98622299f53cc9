#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "miblp/model.hpp"

namespace miblp {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// MPS plus a companion level-assignment file. The MPS side carries the
// single-level data (NAME/ROWS/COLUMNS/RHS/RANGES/BOUNDS/ENDATA, fixed or
// free layout); the companion file assigns rows and columns to the second
// level and supplies the follower objective:
//
//   N <count of second-level columns>
//   M <count of second-level rows>
//   LC <column index>     one line per second-level column
//   LR <row index>        one line per second-level row
//   LO <coefficient>      follower objective, in LC order
//   OS <1 | -1>           follower sense, -1 = maximize
//
// Indices are zero based counting only constraint rows (the objective row
// does not count); pass one_based for files written the other way. A missing
// OS line defaults to minimize and appends a note to warnings when given.
// Every variable must end up with finite bounds, so the BOUNDS section has
// to cover anything the rows leave open.
MiblpInstance parse_mps_aux(const std::string& mps_path, const std::string& aux_path,
                            bool one_based = false,
                            std::vector<std::string>* warnings = nullptr);

// Canonical-form instance as a JSON object: dimensions, objectives, the two
// row blocks as arrays of rows, bounds, and the optional interdiction
// structure. The round trip parse(write(inst)) is exact.
MiblpInstance parse_json(const std::string& path);
void write_json(const MiblpInstance& inst, const std::string& path);

// Dispatch on the inputs: an aux path (or .mps/.aux extension) selects the
// MPS pair, anything else is read as JSON.
MiblpInstance read_instance(const std::string& path, const std::string& aux_path = "",
                            bool one_based = false,
                            std::vector<std::string>* warnings = nullptr);

}  // namespace miblp
