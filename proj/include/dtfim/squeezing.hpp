#pragma once

#include <utility>
#include <vector>

#include "dtfim/fluctuations.hpp"
#include "dtfim/types.hpp"

namespace dtfim {

/// Kitagawa-Ueda squeezing data for one state.
struct SqueezingResult {
    double xi2 = 1.0;              ///< squeezing parameter, >= 0; < 1 means squeezed
    double theta = 0.0;            ///< polar angle of the Bloch vector, [0, pi]
    double phi = 0.0;              ///< azimuth, (-pi, pi]
    RVec3 n1{};                    ///< tangent frame vector 1 (in the x-y plane)
    RVec3 n2{};                    ///< tangent frame vector 2
    double minimizing_angle = 0.0; ///< rotation within (n1, n2) reaching min variance
    bool zero_bloch = false;       ///< frame chosen by convention (|mean| ~ 0)
};

/// (theta, phi) of a Bloch vector; phi = 0 at the poles by convention.
/// Throws ZeroBlochVector below 1e-14.
std::pair<double, double> bloch_angles(const RVec3& mean);

/// Squeezing parameter from spin moments:
/// xi^2 = (N/2) [ <n1^2 + n2^2> - sqrt(<n1^2 - n2^2>^2 + 4 <n1 n2>^2) ],
/// evaluated on the covariance projected onto the tangent frame. A vanishing
/// Bloch vector falls back to n1 = x, n2 = y and sets `zero_bloch`.
SqueezingResult squeezing_parameter(const SpinMoments& moments, long natoms);

struct SqueezingRow {
    double sweep_value = 0.0;
    BranchLabel branch = BranchLabel::lower;
    double xi2 = 0.0;
    unsigned flags = kFlagOk;
};

/// xi^2 per stable branch along a sweep; near-critical and no-stable points
/// are flagged rather than evaluated.
std::vector<SqueezingRow> squeezing_scan(const SystemParams& p, const SweepSpec& sweep);

struct MapSpec {
    double v_lo = 0.0, v_hi = 0.0;
    int v_steps = 2;
    double omega_lo = 0.0, omega_hi = 0.0;
    int omega_steps = 2;
};

struct MapCell {
    double vint = 0.0;
    double omega = 0.0;
    double xi2 = 0.0;
    unsigned flags = kFlagOk;
};

/// xi^2 over a (V, Omega) grid at fixed delta. Points with more than one
/// branch are flagged kFlagNotUnique (the map regime has a unique branch).
std::vector<MapCell> squeezing_map(const SystemParams& p, const MapSpec& grid);

}  // namespace dtfim
