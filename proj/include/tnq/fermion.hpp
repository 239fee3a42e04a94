#pragma once

#include <string>
#include <vector>

namespace tnq {

// Transverse magnetization of the infinite chain without longitudinal
// field, evaluated mode by mode from the exact quasiparticle picture.
// Supported initial states are "X+" (every mode empty) and "Z+" (ground
// state of the pure coupling term).  The momentum integral is done
// adaptively to an absolute tolerance of 1e-6.
std::vector<double> free_fermion_sigma_x(const std::string& initial, double g,
                                         const std::vector<double>& times);

}  // namespace tnq
