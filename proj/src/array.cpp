// SPDX-License-Identifier: Apache-2.0
//
// otfs-radar: OTFS MIMO radar detection and estimation simulator
// Copyright (C) 2026 The otfs-radar authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "otfsradar/array.hpp"

#include <algorithm>
#include <cmath>

namespace otfsradar {

namespace {

void check_angle(double phi, const char* what)
{
    if (!(phi >= -kPi / 2 && phi <= kPi / 2))
        throw InvalidArgument(std::string(what) + ": angle must lie in [-pi/2, pi/2]");
}

CMatrix unit_columns(std::span<const double> angles, int n_antennas)
{
    CMatrix f(n_antennas, static_cast<Eigen::Index>(angles.size()));
    const double norm = 1.0 / std::sqrt(static_cast<double>(n_antennas));
    for (std::size_t i = 0; i < angles.size(); ++i) f.col(static_cast<Eigen::Index>(i)) = steering(angles[i], n_antennas) * norm;
    return f;
}

void normalize_power(BeamformerSet& beams)
{
    const double power = (beams.f * beams.v).squaredNorm();
    if (!(power > 0)) throw DegenerateError("beamformer: transmit beam has zero power");
    beams.v *= std::sqrt(static_cast<double>(beams.n_antennas()) / power);
}

} // namespace

CVector steering(double phi_rad, int n_antennas)
{
    check_angle(phi_rad, "steering");
    if (n_antennas < 1) throw InvalidArgument("steering: need at least one antenna");
    const double step = kPi * std::sin(phi_rad);
    CVector a(n_antennas);
    for (int n = 0; n < n_antennas; ++n) a[n] = std::polar(1.0, n * step);
    return a;
}

CVector steering_derivative(double phi_rad, int n_antennas)
{
    const CVector a = steering(phi_rad, n_antennas);
    const double rate = kPi * std::cos(phi_rad);
    CVector d(n_antennas);
    for (int n = 0; n < n_antennas; ++n) d[n] = kJ * (n * rate) * a[n];
    return d;
}

CMatrix BeamformerSet::spatial_factor(double phi_rad) const
{
    const CVector a = steering(phi_rad, n_antennas());
    const CVector rx = u * a;                          // U b(phi)
    const Eigen::RowVectorXcd tx = a.adjoint() * f * v;  // a^H F V
    return rx * tx;
}

CMatrix BeamformerSet::spatial_factor_derivative(double phi_rad) const
{
    const CVector a = steering(phi_rad, n_antennas());
    const CVector da = steering_derivative(phi_rad, n_antennas());
    const CVector rx = u * a;
    const CVector drx = u * da;
    const Eigen::RowVectorXcd tx = a.adjoint() * f * v;
    const Eigen::RowVectorXcd dtx = da.adjoint() * f * v;
    return drx * tx + rx * dtx;
}

BeamformerSet BeamformerSet::stream_view(int stream) const
{
    if (stream < 0 || stream >= n_streams()) throw InvalidArgument("stream_view: stream index out of range");
    BeamformerSet out;
    out.f = f * v.col(stream);
    out.u = u;
    out.v = CMatrix::Ones(1, 1);
    out.phase = phase;
    if (static_cast<std::size_t>(stream) < beam_centers_rad.size())
        out.beam_centers_rad = {beam_centers_rad[static_cast<std::size_t>(stream)]};
    return out;
}

std::vector<double> detection_angles(double sector_width_rad, int n_rf)
{
    if (n_rf < 2 || n_rf % 2 != 0)
        throw InvalidArgument("detection beams need an even number of RF chains (the sector grid is symmetric about "
                              "broadside); got n_rf = " + std::to_string(n_rf));
    if (!(sector_width_rad > 0) || sector_width_rad > kPi)
        throw InvalidArgument("detection beams: sector width must lie in (0, pi]");
    std::vector<double> angles;
    for (int k = 0; k < n_rf / 2; ++k) {
        const double a = sector_width_rad / (2.0 * n_rf) + k * sector_width_rad / n_rf;
        angles.push_back(a);
        angles.push_back(-a);
    }
    std::sort(angles.begin(), angles.end());
    return angles;
}

BeamformerSet detection_beamformers(double sector_width_rad, const SystemConfig& config)
{
    config.validate();
    BeamformerSet beams;
    beams.beam_centers_rad = detection_angles(sector_width_rad, config.n_rf);
    beams.f = unit_columns(beams.beam_centers_rad, config.n_antennas);
    beams.u = beams.f.adjoint();
    beams.v = CMatrix::Ones(config.n_rf, 1);
    beams.phase = BeamPhase::Detection;
    normalize_power(beams);
    return beams;
}

BeamformerSet tracking_beamformers(std::span<const double> aoa_estimates_rad, double sector_width_rad,
                                   const SystemConfig& config)
{
    config.validate();
    const auto p = static_cast<int>(aoa_estimates_rad.size());
    if (p < 1) throw InvalidArgument("tracking beams: need at least one AoA estimate");
    if (p > config.n_rf) throw InvalidArgument("tracking beams: more targets than RF chains");
    for (double phi : aoa_estimates_rad) check_angle(phi, "tracking beams");

    const auto det_angles = detection_angles(sector_width_rad, config.n_rf);
    const CMatrix det_f = unit_columns(det_angles, config.n_antennas);

    BeamformerSet beams;
    beams.f = det_f;
    beams.f.leftCols(p) = unit_columns(aoa_estimates_rad, config.n_antennas);
    beams.u = det_f.adjoint();
    beams.v = CMatrix::Zero(config.n_rf, p);
    for (int i = 0; i < p; ++i) beams.v(i, i) = 1.0;
    beams.phase = BeamPhase::Tracking;
    beams.beam_centers_rad.assign(aoa_estimates_rad.begin(), aoa_estimates_rad.end());
    normalize_power(beams);
    return beams;
}

double tx_beam_gain(const BeamformerSet& beams, double phi_rad)
{
    const CVector a = steering(phi_rad, beams.n_antennas());
    const CMatrix fv = beams.f * beams.v;
    return (a.adjoint() * fv).squaredNorm() / fv.squaredNorm();
}

double three_db_beamwidth(int n_antennas)
{
    if (n_antennas < 2) throw InvalidArgument("three_db_beamwidth: need at least two antennas");
    return 2.0 * 0.886 / n_antennas;
}

} // namespace otfsradar
