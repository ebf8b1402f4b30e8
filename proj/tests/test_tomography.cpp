#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "qlsys/hhl.hpp"
#include "qlsys/tomography.hpp"
#include "support/generators.hpp"

using namespace qlsys;
using namespace qlsys::tomo;
using qlsys::testing::max_abs;
using qlsys::testing::Rng;

namespace {

constexpr Real kPi = std::numbers::pi;

DensityMatrix ideal_final(Real theta, hhl::RotationMode mode = hhl::RotationMode::LinearApprox) {
  hhl::SolverConfig cfg;
  cfg.rotation_mode = mode;
  return DensityMatrix::from_pure(hhl::theoretical_final_state(hhl::LinearSystem::demo(theta), cfg));
}

DensityMatrix basis_rho(std::size_t idx) { return DensityMatrix::from_pure(PureState::basis(4, idx)); }

template <typename F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST(Catalog, Sizes) {
  EXPECT_EQ(pulse_catalog(CatalogKind::Full).size(), 44u);
  EXPECT_EQ(pulse_catalog(CatalogKind::Partial).size(), 5u);
  EXPECT_EQ(pulse_catalog(CatalogKind::Partial).front().name, "YEEE");
}

TEST(Catalog, FirstPartialPulseRotatesCarbonOnly) {
  const auto p = pulse_catalog(CatalogKind::Partial).front();
  const ComplexMatrix expect = kron(ry_matrix(kPi / 2), ComplexMatrix(ComplexMatrix::Identity(8, 8)));
  EXPECT_LT(max_abs(p.op - expect), 1e-15);
}

TEST(Catalog, AllUnitary) {
  for (auto kind : {CatalogKind::Full, CatalogKind::Partial}) {
    for (const auto& p : pulse_catalog(kind)) EXPECT_LT(unitarity_defect(p.op), 1e-10) << p.name;
  }
}

TEST(Catalog, NamesParseCaseInsensitively) {
  EXPECT_EQ(max_abs(make_pulse("yeee*swap13").op - make_pulse("YEEE*SWAP13").op), 0.0);
  EXPECT_THROW(make_pulse("YEE"), Error);
  EXPECT_THROW(make_pulse("ZEEE"), Error);
  EXPECT_THROW(make_pulse("SWAP11"), Error);
  EXPECT_THROW(make_pulse(""), Error);
}

TEST(Catalog, ObservablesAreComplete) {
  EXPECT_EQ(observable_rank(pulse_catalog(CatalogKind::Full)), 256);
  EXPECT_EQ(partial_population_rank(), 16);
  EXPECT_LT(observable_rank(pulse_catalog(CatalogKind::Partial)), 256);
}

TEST(Readout, IdentityPulseOnGround) {
  const auto rec = simulate_readout(basis_rho(0), {make_pulse("EEEE")});
  EXPECT_NEAR(rec[0].populations(0), 1.0, 1e-15);
}

TEST(Readout, SwapMovesLastQubitToCarbon) {
  const auto rec = simulate_readout(basis_rho(0b0001), {make_pulse("YEEE*SWAP14")});
  // oracle: explicit permutation |abcd> -> |dbca>, then Ry(pi/2) on the carbon
  ComplexMatrix perm = ComplexMatrix::Zero(16, 16);
  for (int s = 0; s < 16; ++s) {
    const int a = (s >> 3) & 1, d = s & 1;
    const int t = (s & 0b0110) | (d << 3) | a;
    perm(t, s) = 1;
  }
  const ComplexMatrix op = kron(ry_matrix(kPi / 2), ComplexMatrix(ComplexMatrix::Identity(8, 8))) * perm;
  const RealVector expect = (op * basis_rho(0b0001).matrix() * op.adjoint()).diagonal().real();
  EXPECT_LT((rec[0].populations - expect).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(rec[0].populations(0b0000), 0.5, 1e-15);
  EXPECT_NEAR(rec[0].populations(0b1000), 0.5, 1e-15);
}

TEST(Readout, PopulationsSumToOne) {
  Rng rng(50);
  const auto rho = qlsys::testing::random_density(rng, 4);
  for (const auto& rec : simulate_readout(rho, pulse_catalog(CatalogKind::Full))) {
    EXPECT_NEAR(rec.populations.sum(), 1.0, 1e-10) << rec.pulse;
  }
}

TEST(Readout, YReadoutGivesPopulationDifferences) {
  Rng rng(51);
  const auto rho = qlsys::testing::random_density(rng, 4);
  const auto rec = simulate_readout(rho, {make_pulse("YEEE")})[0];
  for (int s = 0; s < 8; ++s) {
    EXPECT_NEAR(rec.peaks(s).real(), rho.matrix()(s, s).real() - rho.matrix()(s + 8, s + 8).real(), 1e-14);
  }
}

TEST(Reconstruct, GroundState) {
  const auto rho = basis_rho(0);
  EXPECT_NEAR(fidelity(reconstruct_density(simulate_readout(rho, pulse_catalog(CatalogKind::Full))), rho), 1.0, 1e-9);
}

TEST(Reconstruct, IdealFinalStatesAndPps) {
  const auto full = pulse_catalog(CatalogKind::Full);
  for (Real theta : {1.7419501646378182, 1.3044332446524245, kPi / 2}) {
    const auto rho = ideal_final(theta);
    EXPECT_GT(fidelity(reconstruct_density(simulate_readout(rho, full)), rho), 0.999);
  }
  const auto pps = nmr::pps_state(1e-5);
  EXPECT_GT(fidelity(reconstruct_density(simulate_readout(pps, full)), pps), 0.999);
}

TEST(Reconstruct, RoundTripIsIdentityOnRandomStates) {
  Rng rng(52);
  const auto full = pulse_catalog(CatalogKind::Full);
  for (int trial = 0; trial < 20; ++trial) {
    const auto rho = qlsys::testing::random_density(rng, 4, trial % 3 == 0 ? 1 : 0);
    const auto back = reconstruct_density(simulate_readout(rho, full));
    EXPECT_GT(fidelity(back, rho), 1 - 1e-6);
    EXPECT_LT(max_abs(back.matrix() - rho.matrix()), 1e-9);
  }
}

TEST(Reconstruct, InsufficientRecords) {
  const auto rho = basis_rho(0);
  EXPECT_EQ(kind_of([&] { reconstruct_density(simulate_readout(rho, pulse_catalog(CatalogKind::Partial))); }),
            ErrorKind::InsufficientRecords);
  EXPECT_EQ(kind_of([&] { reconstruct_density({}); }), ErrorKind::InsufficientRecords);
}

TEST(Partial, EqualSolution) {
  const auto part = extract_solution_partial(simulate_readout(ideal_final(kPi / 2), pulse_catalog(CatalogKind::Partial)));
  EXPECT_NEAR(part.ratio(), 1.0, 1e-9);
  EXPECT_EQ(part.phase_sign, 1);
}

TEST(Partial, BasisInputExact) {
  hhl::SolverConfig cfg;
  cfg.rotation_mode = hhl::RotationMode::ExactArcsin;
  ComplexVector b(2);
  b << 1, 0;
  const auto rho = DensityMatrix::from_pure(hhl::theoretical_final_state(hhl::LinearSystem(hhl::demo_matrix(), b), cfg));
  const auto part = extract_solution_partial(simulate_readout(rho, pulse_catalog(CatalogKind::Partial)));
  EXPECT_NEAR(part.ratio(), 9.0, 1e-9);
  EXPECT_EQ(part.phase_sign, -1);
  const RealVector x = part.solution();
  EXPECT_NEAR(x(0), 3 / std::sqrt(10.0), 1e-9);
  EXPECT_NEAR(x(1), -1 / std::sqrt(10.0), 1e-9);
}

TEST(Partial, VanishingSecondComponent) {
  const auto part = extract_solution_partial(simulate_readout(basis_rho(0b0001), pulse_catalog(CatalogKind::Partial)));
  EXPECT_NEAR(part.c_sq, 1.0, 1e-12);
  EXPECT_NEAR(part.d_sq, 0.0, 1e-12);
  EXPECT_EQ(kind_of([&] { part.ratio(); }), ErrorKind::SubspaceMassTooSmall);
  EXPECT_EQ(kind_of([&] { extract_solution_partial(simulate_readout(basis_rho(0), pulse_catalog(CatalogKind::Partial))); }),
            ErrorKind::SubspaceMassTooSmall);
}

TEST(Partial, MatchesStatevectorAmplitudes) {
  Rng rng(53);
  for (int trial = 0; trial < 30; ++trial) {
    const auto psi = qlsys::testing::random_pure(rng, 4);
    const auto part =
        extract_solution_partial(simulate_readout(DensityMatrix::from_pure(psi), pulse_catalog(CatalogKind::Partial)));
    const Complex c = psi[0b0001], d = psi[0b0011];
    EXPECT_NEAR(part.c_sq, std::norm(c), 1e-9);
    EXPECT_NEAR(part.d_sq, std::norm(d), 1e-9);
    EXPECT_NEAR(part.re_cd, (c * std::conj(d)).real(), 1e-9);
  }
}

TEST(Partial, MissingRecord) {
  auto recs = simulate_readout(basis_rho(1), pulse_catalog(CatalogKind::Partial));
  recs.pop_back();
  EXPECT_EQ(kind_of([&] { extract_solution_partial(recs); }), ErrorKind::InsufficientRecords);
}

TEST(Records, JsonRoundTrip) {
  Rng rng(54);
  const auto recs = simulate_readout(qlsys::testing::random_density(rng, 4), pulse_catalog(CatalogKind::Full));
  const auto back = records_from_json(records_to_json(recs));
  ASSERT_EQ(back.size(), recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    EXPECT_EQ(back[i].pulse, recs[i].pulse);
    EXPECT_EQ(back[i].populations, recs[i].populations);
    EXPECT_EQ(back[i].peaks, recs[i].peaks);
  }
  EXPECT_EQ(kind_of([] { records_from_json("{\"YEEE\": 3}"); }), ErrorKind::ConfigParseError);
  EXPECT_EQ(kind_of([] { records_from_json("not json"); }), ErrorKind::ConfigParseError);
}

TEST(Records, SeededNoiseIsReproducible) {
  const auto clean = simulate_readout(ideal_final(kPi / 2), pulse_catalog(CatalogKind::Full));
  auto a = clean, b = clean, c = clean;
  add_readout_noise(a, 1e-3, 7);
  add_readout_noise(b, 1e-3, 7);
  add_readout_noise(c, 1e-3, 8);
  EXPECT_EQ(records_to_json(a), records_to_json(b));
  EXPECT_NE(records_to_json(a), records_to_json(c));
  EXPECT_GT(fidelity(reconstruct_density(a), ideal_final(kPi / 2)), 0.99);
}

TEST(Records, FitRoutingPreservesAmplitudes) {
  const auto clean = simulate_readout(ideal_final(1.7419501646378182), pulse_catalog(CatalogKind::Partial));
  auto fitted = clean;
  refit_peaks(fitted, nmr::MoleculeParams::defaults());
  for (std::size_t i = 0; i < clean.size(); ++i) {
    EXPECT_LT((fitted[i].peaks - clean[i].peaks).cwiseAbs().maxCoeff(), 1e-6) << clean[i].pulse;
  }
}
