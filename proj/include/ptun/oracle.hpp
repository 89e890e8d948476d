#pragma once

// Brute-force reference for the bra-kets, independent of the panel engine:
// no phase removal, no adaptive refinement, no band expansion. Used by the
// tests and the acceptance checks to validate the production quadrature.

#include "ptun/field.hpp"
#include "ptun/grid.hpp"
#include "ptun/volkov.hpp"

namespace ptun::oracle {

struct Brakets {
  cplx entrance{};
  cplx exit{};
};

/// Entrance and exit bra-kets of entry channel j and exit channel j_pp on shell.
/// The window is split at the classical turning points of the channel and each
/// segment is mapped with x = a + (b - a)(1 - cos pi t)/2, which removes the
/// inverse-square-root behaviour of the WKB prefactor at the segment ends.
/// Uniform 16-point Gauss-Legendre panels in t follow, `panels_per_wavelength`
/// per shortest de Broglie wavelength of the segment. The WKB wave comes from
/// its own phase table and the Bessel-factor sums are written out term by term.
Brakets brute_force(const OperatingPoint& op, const AmplitudeGrid& grid, const TruncationBounds& bounds, int j,
                    int j_pp, double panels_per_wavelength = 2.0);

}  // namespace ptun::oracle
