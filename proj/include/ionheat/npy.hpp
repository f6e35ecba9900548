// npy.hpp — NPY-format snapshots of operators and states
//
// Composite-space matrices are stored as 4-D complex128 arrays of shape
// (n_r, n_z, n_r, n_z) in C order, so the header itself records both
// truncations. Compatible with numpy.load.

#pragma once

#include "ionheat/fock.hpp"

#include <string>

namespace ionheat::npy {

void save_matrix(const std::string& path, const fock::MatrixXcd& m,
                 const fock::FockDims& dims);

struct LoadedMatrix {
    fock::FockDims dims;
    fock::MatrixXcd matrix;
};

LoadedMatrix load_matrix(const std::string& path);

} // namespace ionheat::npy
