#pragma once

#include <vector>

#include "maghelm/model.hpp"
#include "maghelm/potentials.hpp"

/// Angular eigenmodes of the magnetic Laplace-Beltrami part for radial-compatible potentials.
namespace maghelm::angular {

/// Modes with |azimuth| and total order up to cutoff, in ModeIndex order.
std::vector<ModeIndex> modes(const PotentialSpec& spec, int d, int cutoff);
/// Mode with the given labels (index = l or n, azimuth = m); d=2 uses index = m.
ModeIndex mode(const PotentialSpec& spec, int d, int index, int azimuth);

/// Normalized angular function at direction (theta, phi); d=2 ignores theta.
cplx value(const PotentialSpec& spec, const ModeIndex& mode, double theta, double phi);
/// <Y_{l m}, Theta_mode> on the sphere (standard harmonic labels; d=2 uses l = m).
cplx overlap_with_harmonic(const PotentialSpec& spec, const ModeIndex& mode, int l, int m);

/// Standard complex spherical harmonic (Condon-Shortley phase), or e^{i m phi}/sqrt(2 pi) for d=2.
cplx standard_harmonic(int d, int l, int m, double theta, double phi);

}  // namespace maghelm::angular
