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

#include "otfsradar/crlb.hpp"

#include <cmath>
#include <sstream>

namespace otfsradar {

ModelDerivatives model_derivatives(const Target& target, const DelayDopplerOperator& op, const BeamformerSet& beams)
{
    if (beams.n_streams() != op.n_streams())
        throw InvalidArgument("model_derivatives: beamformer stream count does not match the frame");
    const auto z = op.apply_with_derivatives(target.delay_s, target.doppler_hz);
    const CMatrix s = beams.spatial_factor(target.aoa_rad);
    const CMatrix ds = beams.spatial_factor_derivative(target.aoa_rad);
    const Complex h = target.gain;
    const double a = std::abs(h);

    ModelDerivatives d;
    const CVector g = mix_streams(s, z.value);
    d.value = h * g;
    d.partial[static_cast<int>(Param::Amplitude)] = (a > 0 ? h / a : Complex(1.0, 0.0)) * g;
    d.partial[static_cast<int>(Param::Phase)] = kJ * d.value;
    d.partial[static_cast<int>(Param::Delay)] = h * mix_streams(s, z.d_delay);
    d.partial[static_cast<int>(Param::Doppler)] = h * mix_streams(s, z.d_doppler);
    d.partial[static_cast<int>(Param::Aoa)] = h * mix_streams(ds, z.value);
    return d;
}

RMatrix fisher(std::span<const Target> targets, const DelayDopplerOperator& op, const BeamformerSet& beams,
               double noise_var)
{
    if (targets.empty()) throw InvalidArgument("fisher: need at least one target");
    if (!(noise_var > 0)) throw InvalidArgument("fisher: noise variance must be positive");
    const auto p = static_cast<Eigen::Index>(targets.size());
    const Eigen::Index len = static_cast<Eigen::Index>(beams.n_rf()) * op.geometry().cells();
    CMatrix jac(len, kParamsPerTarget * p);
    for (Eigen::Index t = 0; t < p; ++t) {
        const auto d = model_derivatives(targets[static_cast<std::size_t>(t)], op, beams);
        for (int b = 0; b < kParamsPerTarget; ++b) jac.col(b * p + t) = d.partial[static_cast<std::size_t>(b)];
    }
    RMatrix f = (2.0 / noise_var) * (jac.adjoint() * jac).real();
    return 0.5 * (f + f.transpose());
}

CrlbResult crlb_bounds(const RMatrix& fisher_matrix, const SystemConfig& config)
{
    const Eigen::Index n = fisher_matrix.rows();
    if (n == 0 || n != fisher_matrix.cols() || n % kParamsPerTarget != 0)
        throw InvalidArgument("crlb_bounds: Fisher matrix must be square with 5P rows");
    const Eigen::Index p = n / kParamsPerTarget;

    auto singular = [&](const Eigen::VectorXd& dir, const std::string& why) {
        std::vector<double> v(dir.data(), dir.data() + dir.size());
        std::ostringstream msg;
        msg << "crlb_bounds: singular Fisher matrix (" << why << "); null direction [";
        for (Eigen::Index i = 0; i < dir.size(); ++i) msg << (i ? ", " : "") << dir[i];
        msg << "]";
        throw SingularFisherError(msg.str(), std::move(v));
    };

    // Parameters live on very different scales; work with the unit-diagonal form.
    Eigen::VectorXd scale(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(fisher_matrix(i, i) > 0)) singular(Eigen::VectorXd::Unit(n, i), "parameter with no information");
        scale[i] = 1.0 / std::sqrt(fisher_matrix(i, i));
    }
    const RMatrix normalized = scale.asDiagonal() * fisher_matrix * scale.asDiagonal();
    Eigen::SelfAdjointEigenSolver<RMatrix> eig(normalized);
    const double lmin = eig.eigenvalues().minCoeff();
    const double lmax = eig.eigenvalues().maxCoeff();
    if (!(lmin > 1e-12 * lmax)) {
        Eigen::VectorXd dir = scale.asDiagonal() * eig.eigenvectors().col(0);
        singular(dir.normalized(), "unidentifiable parameter combination");
    }
    const RMatrix inv_n = eig.eigenvectors() * eig.eigenvalues().cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
    const Eigen::VectorXd diag = scale.cwiseProduct(scale).cwiseProduct(inv_n.diagonal());

    const double c = config.speed_of_light_mps;
    const double r_scale = (c / 2) * (c / 2);
    const double v_scale = (c / (2 * config.carrier_hz)) * (c / (2 * config.carrier_hz));
    CrlbResult out;
    out.condition_number = lmax / lmin;
    for (Eigen::Index t = 0; t < p; ++t) {
        auto at = [&](Param b) { return diag[static_cast<int>(b) * p + t]; };
        TargetBounds tb;
        tb.amplitude_var = at(Param::Amplitude);
        tb.phase_var = at(Param::Phase);
        tb.delay_var = at(Param::Delay);
        tb.doppler_var = at(Param::Doppler);
        tb.aoa_var = at(Param::Aoa);
        tb.range_var = tb.delay_var * r_scale;
        tb.velocity_var = tb.doppler_var * v_scale;
        out.targets.push_back(tb);
    }
    return out;
}

} // namespace otfsradar
