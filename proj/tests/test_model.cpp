#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "tlsscope/diagnostics.hpp"
#include "tlsscope/errors.hpp"
#include "tlsscope/model.hpp"

using namespace tlsscope;

namespace {

// Reference values from tests/oracles/csfq_spectrum.py (numpy eigvalsh, cutoff 60).
constexpr double kOmega01 = 4.720660242664;
constexpr double kOmega12 = 5.456031573538;
constexpr double kOmega01At503 = 4.772132329031;
constexpr double kRotorOmega01 = 12.333252476625;
constexpr double kOmegaB = 3.634501341312;
constexpr double kDuffingA = 1.853023255814;

QubitDeviceParams device_defaults() { return QubitDeviceParams{}; }

Eigen::VectorXd sorted_eigenvalues(const Operator& h) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix());
    return es.eigenvalues();
}

}  // namespace

TEST(DeviceParams, MeasuredDefaults) {
    const QubitDeviceParams p = device_defaults();
    EXPECT_DOUBLE_EQ(p.e_cs.value, 0.24);
    EXPECT_DOUBLE_EQ(p.e_j.value, 160.0);
    EXPECT_DOUBLE_EQ(p.alpha, 0.457);
    EXPECT_TRUE(p.violations().empty());
}

TEST(DeviceParams, SingleWellViolation) {
    QubitDeviceParams p;
    p.alpha = 0.6;
    const auto v = p.violations();
    ASSERT_EQ(v.size(), 1u);
    EXPECT_NE(v[0].find("single-well"), std::string::npos);
    EXPECT_THROW(p.validate(), DomainError);
}

TEST(CsfqHamiltonian, RejectsSmallCutoff) {
    EXPECT_THROW(csfq_hamiltonian_1d(device_defaults(), FluxBias{0.5}, 19), DomainError);
    EXPECT_NO_THROW(csfq_hamiltonian_1d(device_defaults(), FluxBias{0.5}, 20));
}

TEST(CsfqHamiltonian, HermitianWithExpectedStructure) {
    const QubitDeviceParams p = device_defaults();
    const Operator h = csfq_hamiltonian_1d(p, FluxBias{0.503}, 20);
    EXPECT_EQ(h.dim(), 41);
    EXPECT_LE(h.hermiticity_error(), 1e-12);
    EXPECT_NEAR(h(20, 20).real(), 2.0 * 160.0 + 0.457 * 160.0, 1e-12);
    EXPECT_NEAR(h(21, 21).real(), 0.24 + 2.0 * 160.0 + 0.457 * 160.0, 1e-12);
    EXPECT_NEAR(h(21, 20).real(), -160.0, 1e-12);
    const Complex expected = -0.5 * 0.457 * 160.0 * std::polar(1.0, kTwoPi * 0.503);
    EXPECT_NEAR(std::abs(h(22, 20) - expected), 0.0, 1e-12);
    EXPECT_EQ(h(23, 20), Complex(0.0));
}

TEST(CsfqFrequencies, MatchesIndependentOracle) {
    const DerivedQubitFreqs f = csfq_frequencies(device_defaults(), FluxBias{0.5});
    EXPECT_NEAR(f.omega01.value, kOmega01, 1e-8);
    EXPECT_NEAR(f.omega12.value, kOmega12, 1e-8);
    EXPECT_NEAR(f.anharmonicity.value, kOmega12 - kOmega01, 1e-8);
    EXPECT_NEAR(f.omega_b.value, kOmegaB, 1e-9);
    EXPECT_GE(f.charge_cutoff, 60);
    EXPECT_NEAR(csfq_frequencies(device_defaults(), FluxBias{0.503}).omega01.value, kOmega01At503, 1e-8);
}

TEST(CsfqFrequencies, RotorLimit) {
    QubitDeviceParams p = device_defaults();
    p.alpha = 1e-12;
    EXPECT_NEAR(csfq_frequencies(p, FluxBias{0.37}).omega01.value, kRotorOmega01, 1e-6);
}

TEST(CsfqFrequencies, FluxSymmetry) {
    const QubitDeviceParams p = device_defaults();
    for (double d : {0.001, 0.003, 0.008}) {
        const double up = csfq_frequencies(p, FluxBias{0.5 + d}).omega01.value;
        const double down = csfq_frequencies(p, FluxBias{0.5 - d}).omega01.value;
        EXPECT_LE(std::abs(up - down), 1e-9) << "delta=" << d;
    }
}

TEST(QubitFrequencyModel, AnchorsToSweetSpot) {
    QubitDeviceParams p = device_defaults();
    EXPECT_FALSE(QubitFrequencyModel(p).anchored());
    p.sweet_spot_omega01 = Ghz{3.825};
    p.sweet_spot_anharmonicity = Ghz{1.0};
    const QubitFrequencyModel m(p);
    EXPECT_TRUE(m.anchored());
    const DerivedQubitFreqs s = m.at(FluxBias{0.5});
    EXPECT_NEAR(s.omega01.value, 3.825, 1e-12);
    EXPECT_NEAR(s.anharmonicity.value, 1.0, 1e-12);
    EXPECT_NEAR(s.omega12.value, 4.825, 1e-12);
    const double shift = kOmega01At503 - kOmega01;
    EXPECT_NEAR(m.at(FluxBias{0.503}).omega01.value, 3.825 + shift, 1e-8);
}

TEST(Duffing, MeasuredParameters) {
    set_warnings_silenced(true);
    const std::size_t before = warning_count();
    const DuffingParams d = duffing_params(device_defaults());
    EXPECT_NEAR(d.omega_b.value, 3.634, 1e-3);
    EXPECT_NEAR(d.anharmonicity.value, 1.853, 1e-3);
    EXPECT_NEAR(d.anharmonicity.value, kDuffingA, 1e-12);
    EXPECT_TRUE(d.validity_warning);
    EXPECT_GT(warning_count(), before);
    set_warnings_silenced(false);
}

TEST(Duffing, ZeroAnharmonicityAtOneEighth) {
    QubitDeviceParams p = device_defaults();
    p.alpha = 0.125;
    EXPECT_EQ(duffing_params(p).anharmonicity.value, 0.0);
}

TEST(Duffing, Homogeneity) {
    set_warnings_silenced(true);
    QubitDeviceParams p = device_defaults();
    const DuffingParams a = duffing_params(p);
    p.e_cs.value *= 4.0;
    p.e_j.value *= 4.0;
    const DuffingParams b = duffing_params(p);
    EXPECT_NEAR(b.omega_b.value, 4.0 * a.omega_b.value, 1e-12);
    EXPECT_NEAR(b.anharmonicity.value, 4.0 * a.anharmonicity.value, 1e-12);
    set_warnings_silenced(false);
}

TEST(Duffing, RejectsDoubleWell) {
    QubitDeviceParams p = device_defaults();
    p.alpha = 0.5;
    EXPECT_THROW(duffing_params(p), DomainError);
}

TEST(Couplings, LinearCharge) {
    EXPECT_EQ(coupling_g_linear(0.0, Ghz{kOmegaB}, Ghz{0.24}).value, 0.0);
    EXPECT_NEAR(charge_fluctuation_from_g(Mhz{0.05}, Ghz{kOmegaB}, Ghz{0.24}), 1.07e-4, 5e-7);
    EXPECT_NEAR(charge_fluctuation_from_g(Mhz{0.05}, Ghz{kOmegaB}, Ghz{0.24}), 1.070710255365e-4, 1e-14);
    const double g1 = coupling_g_linear(1e-4, Ghz{kOmegaB}, Ghz{0.24}).value;
    const double g4 = coupling_g_linear(1e-4, Ghz{kOmegaB}, Ghz{0.96}).value;
    EXPECT_NEAR(g4, 2.0 * g1, 1e-15);
    EXPECT_NEAR(coupling_g_linear(1.070710255365e-4, Ghz{kOmegaB}, Ghz{0.24}).value, 0.05, 1e-12);
}

TEST(Couplings, CriticalCurrent) {
    set_warnings_silenced(true);
    const QubitDeviceParams p = device_defaults();
    const CurrentCouplings at_sweet = coupling_g_current(p, 0.003, FluxBias{0.5});
    EXPECT_EQ(at_sweet.g1.value, 0.0);
    EXPECT_LT(at_sweet.g2.value, 0.0);
    EXPECT_LT(coupling_g_current(p, 0.003, FluxBias{0.502}).g1.value, 0.0);
    EXPECT_NEAR(current_fluctuation_from_g2(p, Mhz{15.0}), 0.0031, 1e-4);
    EXPECT_NEAR(current_fluctuation_from_g2(p, Mhz{-15.0}), 0.003106623822, 1e-11);
    const double r8 = current_fluctuation_from_g2(p, Mhz{8.0});
    const double r22 = current_fluctuation_from_g2(p, Mhz{22.0});
    EXPECT_NEAR(r8, 0.001656866038, 1e-11);
    EXPECT_NEAR(r22, 0.004556381605, 1e-11);
    EXPECT_NEAR(std::abs(coupling_g_current(p, r22, FluxBias{0.5}).g2.value), 22.0, 1e-9);
    EXPECT_THROW(coupling_g_current(p, -1.0, FluxBias{0.5}), DomainError);
    set_warnings_silenced(false);
}

TEST(TlsEigen, Examples) {
    const TlsEigen sym = tls_eigen({0.0, 7.0});
    EXPECT_NEAR(sym.omega_tls.value * kTwoPi * 1e3, 7.0, 1e-12);
    EXPECT_NEAR(sym.theta, std::numbers::pi / 2, 1e-15);
    const TlsEigen t345 = tls_eigen({3.0, 4.0});
    EXPECT_NEAR(angular(t345.omega_tls), 5.0, 1e-12);
    EXPECT_EQ(tls_eigen({2.0, 0.0}).theta, 0.0);
    EXPECT_THROW(tls_eigen({0.0, 0.0}), DomainError);
}

TEST(TlsEigen, PythagoreanProperty) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1e4, 1e4);
    for (int k = 0; k < 100; ++k) {
        const TlsMicroscopic m{u(rng), u(rng)};
        const double w = angular(tls_eigen(m).omega_tls);
        EXPECT_NEAR(w * w, m.epsilon * m.epsilon + m.delta0 * m.delta0,
                    1e-12 * (m.epsilon * m.epsilon + m.delta0 * m.delta0));
    }
}

TEST(TlsEigen, SymmetricDefectPositionOperators) {
    const PositionPaulis p = position_paulis_in_eigenbasis(std::numbers::pi / 2);
    const PauliOps s = pauli_ops();
    EXPECT_LE(max_abs_difference(p.x, s.z), 1e-15);
    EXPECT_LE(max_abs_difference(p.z, Complex(-1.0) * s.x), 1e-15);
}

TEST(RotatingHamiltonians, LinearAnharmonicBlockOnly) {
    const Operator h = h_rot_linear(Ghz{1.0}, Mhz{0.0}, Mhz{0.0}, Mhz{0.0}, HilbertSpec{3});
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 6; ++j) EXPECT_EQ(h(i, j), Complex(0.0));
    }
    EXPECT_NEAR(h(4, 4).real(), angular(Ghz{1.0}), 1e-9);
    EXPECT_NEAR(h(5, 5).real(), angular(Ghz{1.0}), 1e-9);
}

TEST(RotatingHamiltonians, HermitianForRandomParameters) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (int k = 0; k < 50; ++k) {
        const HilbertSpec spec{3 + k % 4};
        const Operator hl = h_rot_linear(Ghz{u(rng) / 50}, Mhz{u(rng)}, Mhz{u(rng)}, Mhz{u(rng)}, spec);
        const Operator hn = h_rot_nonlinear(Ghz{u(rng) / 50}, Mhz{u(rng)}, Mhz{u(rng)}, Mhz{u(rng)}, spec);
        EXPECT_LE(hl.hermiticity_error(), 1e-12);
        EXPECT_LE(hn.hermiticity_error(), 1e-12);
    }
}

TEST(RotatingHamiltonians, LinearMatchesPauliForm) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-40.0, 40.0);
    const PauliOps s = pauli_ops();
    for (int k = 0; k < 20; ++k) {
        const double om = u(rng);
        const double dl = u(rng);
        const double g = u(rng) / 10;
        const Operator h = h_rot_linear(Ghz{1.0}, Mhz{om}, Mhz{dl}, Mhz{g}, HilbertSpec{2});
        // -(Omega/2) s_z + (Delta/2) sigma_z - (g/2)(s_z sigma_x + s_y sigma_y)
        const Operator pauli = Complex(-0.5 * angular(Mhz{om})) * tensor(s.z, Operator::identity(2)) +
                               Complex(0.5 * angular(Mhz{dl})) * tensor(Operator::identity(2), s.z) -
                               Complex(0.5 * angular(Mhz{g})) * (tensor(s.z, s.x) + tensor(s.y, s.y));
        const Eigen::VectorXd a = sorted_eigenvalues(h);
        const Eigen::VectorXd b = sorted_eigenvalues(pauli);
        EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(RotatingHamiltonians, NonlinearMatrixElement) {
    const double g2 = 2.0;
    const Operator h = h_rot_nonlinear(Ghz{1.0}, Mhz{0.0}, Mhz{0.0}, Mhz{g2}, HilbertSpec{3});
    // |0,e> is index 0, |2,g> is index 2*2+1 = 5
    EXPECT_NEAR(h(5, 0).real(), std::sqrt(2.0) * angular(Mhz{g2}), 1e-12);
    EXPECT_LE(h.hermiticity_error(), 1e-12);
    EXPECT_THROW(h_rot_nonlinear(Ghz{1.0}, Mhz{25.0}, Mhz{25.0}, Mhz{2.0}, HilbertSpec{2}), DimensionError);
}

TEST(EffectiveCouplings, Virtual) {
    EXPECT_NEAR(g_eff_virtual(Mhz{2.0}, Mhz{25.0}, Ghz{1.0}).value, 0.025, 1e-15);
    EXPECT_EQ(g_eff_virtual(Mhz{2.0}, Mhz{0.0}, Ghz{1.0}).value, 0.0);
    EXPECT_NEAR(g_eff_virtual(Mhz{4.0}, Mhz{25.0}, Ghz{1.0}).value, 0.05, 1e-15);
    EXPECT_THROW(g_eff_virtual(Mhz{2.0}, Mhz{25.0}, Ghz{0.0}), DomainError);
    set_warnings_silenced(true);
    const std::size_t before = warning_count();
    g_eff_virtual(Mhz{2.0}, Mhz{150.0}, Ghz{1.0});
    EXPECT_EQ(warning_count(), before + 1);
    set_warnings_silenced(false);
}

TEST(EffectiveCouplings, CounterRotating) {
    EXPECT_NEAR(g_eff_counter_rotating(Mhz{2.0}, Mhz{25.0}, Ghz{3.825}).value, 0.00327, 1e-5);
    EXPECT_EQ(g_eff_counter_rotating(Mhz{2.0}, Mhz{0.0}, Ghz{3.825}).value, 0.0);
    const double ratio = g_eff_counter_rotating(Mhz{2.0}, Mhz{25.0}, Ghz{3.825}).value /
                         g_eff_virtual(Mhz{2.0}, Mhz{25.0}, Ghz{1.0}).value;
    EXPECT_NEAR(ratio, 1.0 / (2.0 * 3.825), 1e-12);
    EXPECT_THROW(g_eff_counter_rotating(Mhz{2.0}, Mhz{25.0}, Ghz{0.0}), DomainError);
}

TEST(DefectDetuning, LinearAndNonlinear) {
    const DefectSpec lin{"a", CouplingKind::LinearCharge, Ghz{3.895}, Mhz{0.05}, PerUs{1.0}};
    const DefectSpec nl{"b", CouplingKind::NonlinearCurrent, Ghz{7.945}, Mhz{15.0}, PerUs{2.0}};
    EXPECT_NEAR(defect_detuning(lin, Ghz{3.825}).value, 70.0, 1e-9);
    EXPECT_NEAR(defect_detuning(nl, Ghz{3.8225}).value, 300.0, 1e-9);
}

TEST(DefectSpec, Violations) {
    DefectSpec d{"x", CouplingKind::LinearCharge, Ghz{0.0}, Mhz{-1.0}, PerUs{0.0}};
    EXPECT_EQ(d.violations().size(), 2u);
    EXPECT_EQ(parse_coupling_kind("nonlinear"), CouplingKind::NonlinearCurrent);
    EXPECT_FALSE(parse_coupling_kind("sideways").has_value());
}
