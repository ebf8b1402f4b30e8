/**
 * Copyright 2026, The qlsys authors.
 *
 * This source code and the accompanying materials are made available under
 * the terms of the Apache License 2.0.
 */

#include "qlsys/tomography.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <random>

#include "json.hpp"

namespace qlsys::tomo {

namespace {

constexpr int kQubits = 4;
constexpr Eigen::Index kDim = 16;
constexpr Eigen::Index kParams = kDim * kDim;

const char* const kFullCatalog[] = {
    "EEEE",         "EXEE",         "EYEE",         "EEXE",         "EXXE",         "EYXE",
    "EEYE",         "EXYE",         "EYYE",         "EEEX",         "EXEX",         "EYEX",
    "EEXX",         "EXXX",         "EYXX",         "EEYX",         "EXYX",         "EYYX",
    "EEEY",         "EXEY",         "EYEY",         "EEXY",         "EXXY",         "EYXY",
    "EEYY",         "EXYY",         "EYYY",         "SWAP12*EEYY",  "SWAP12*EEXY",  "SWAP12*EEEY",
    "SWAP12*EEYX",  "SWAP12*EEXX",  "SWAP12*EEEX",  "SWAP12*EEYE",  "SWAP12*EEXE",  "SWAP12*EEEE",
    "SWAP13*EEEY",  "SWAP13*EEEX",  "SWAP13*EEEE",  "SWAP14*EEEE",  "YEEE",         "YEEE*SWAP12",
    "YEEE*SWAP13",  "YEEE*SWAP14",
};

const char* const kPartialCatalog[] = {"YEEE", "YEEE*SWAP12", "YEEE*SWAP13", "YEEE*SWAP14", "XEEE*SWAP13"};

std::string upper(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return s;
}

ComplexMatrix single_qubit(char letter) {
  const Real h = std::numbers::sqrt2 / 2;
  const Complex i{0, 1};
  ComplexMatrix m(2, 2);
  switch (letter) {
    case 'E': m << 1, 0, 0, 1; break;
    case 'X': m << h, -i * h, -i * h, h; break;
    case 'Y': m << h, -h, h, h; break;
    default: throw Error(ErrorKind::InvalidArgument, std::string("unknown pulse letter '") + letter + "'");
  }
  return m;
}

ComplexMatrix swap_operator(int q1, int q2) {
  ComplexMatrix p = ComplexMatrix::Zero(kDim, kDim);
  const auto b1 = qubit_bit(kQubits, q1), b2 = qubit_bit(kQubits, q2);
  for (std::size_t s = 0; s < static_cast<std::size_t>(kDim); ++s) {
    std::size_t t = s & ~(b1 | b2);
    if (s & b1) t |= b2;
    if (s & b2) t |= b1;
    p(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(s)) = 1;
  }
  return p;
}

ComplexMatrix factor_operator(const std::string& factor) {
  if (factor.size() == 6 && factor.rfind("SWAP", 0) == 0) {
    const int i = factor[4] - '1', j = factor[5] - '1';
    if (i < 0 || i >= kQubits || j < 0 || j >= kQubits || i == j) {
      throw Error(ErrorKind::InvalidArgument, "bad swap factor '" + factor + "'");
    }
    return swap_operator(i, j);
  }
  if (factor.size() != kQubits) throw Error(ErrorKind::InvalidArgument, "bad pulse factor '" + factor + "'");
  ComplexMatrix op = single_qubit(factor[0]);
  for (int q = 1; q < kQubits; ++q) op = kron(op, single_qubit(factor[static_cast<std::size_t>(q)])).eval();
  return op;
}

/// Complex coefficient of each real Hermitian parameter in peak s of `u`.
/// Parameter order: diagonal (i), then for each i < j the symmetric and the
/// antisymmetric part.
ComplexVector peak_row(const ComplexMatrix& u, Eigen::Index s) {
  ComplexVector row(kParams);
  auto k = [&](Eigen::Index a, Eigen::Index b) { return 2.0 * u(s, a) * std::conj(u(s + 8, b)); };
  Eigen::Index col = 0;
  for (Eigen::Index i = 0; i < kDim; ++i) row(col++) = k(i, i);
  const Complex im{0, 1};
  for (Eigen::Index i = 0; i < kDim; ++i) {
    for (Eigen::Index j = i + 1; j < kDim; ++j) {
      row(col++) = k(i, j) + k(j, i);
      row(col++) = im * (k(i, j) - k(j, i));
    }
  }
  return row;
}

ComplexMatrix from_parameters(const RealVector& x) {
  ComplexMatrix rho(kDim, kDim);
  Eigen::Index col = 0;
  for (Eigen::Index i = 0; i < kDim; ++i) rho(i, i) = x(col++);
  for (Eigen::Index i = 0; i < kDim; ++i) {
    for (Eigen::Index j = i + 1; j < kDim; ++j) {
      const Complex v{x(col), x(col + 1)};
      col += 2;
      rho(i, j) = v;
      rho(j, i) = std::conj(v);
    }
  }
  return rho;
}

RealMatrix design_matrix(const std::vector<ComplexMatrix>& ops) {
  RealMatrix a = RealMatrix::Zero(static_cast<Eigen::Index>(ops.size()) * 16 + 1, kParams);
  Eigen::Index r = 0;
  for (const auto& u : ops) {
    for (Eigen::Index s = 0; s < 8; ++s) {
      const ComplexVector row = peak_row(u, s);
      a.row(r++) = row.real().transpose();
      a.row(r++) = row.imag().transpose();
    }
  }
  a.row(r).head(kDim).setOnes();
  return a;
}

struct Inverter {
  int rank = 0;
  RealMatrix pinv;
};

Inverter make_inverter(const RealMatrix& a) {
  Eigen::BDCSVD<RealMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-9);
  Inverter inv;
  inv.rank = static_cast<int>(svd.rank());
  const RealVector& sv = svd.singularValues();
  RealVector sinv = RealVector::Zero(sv.size());
  for (Eigen::Index i = 0; i < inv.rank; ++i) sinv(i) = 1 / sv(i);
  inv.pinv = svd.matrixV() * sinv.asDiagonal() * svd.matrixU().transpose();
  return inv;
}

const Inverter& cached_inverter(const std::vector<std::string>& names) {
  static std::mutex mutex;
  static std::map<std::vector<std::string>, Inverter> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(names);
  if (it == cache.end()) {
    std::vector<ComplexMatrix> ops;
    for (const auto& n : names) ops.push_back(make_pulse(n).op);
    it = cache.emplace(names, make_inverter(design_matrix(ops))).first;
  }
  return it->second;
}

const MeasurementRecord* find_record(const std::vector<MeasurementRecord>& records, const std::string& name) {
  const std::string key = upper(name);
  for (const auto& r : records) {
    if (upper(r.pulse) == key) return &r;
  }
  return nullptr;
}

RealMatrix population_rows(const std::vector<ComplexMatrix>& ops) {
  RealMatrix a = RealMatrix::Zero(static_cast<Eigen::Index>(ops.size()) * 8 + 1, kDim);
  Eigen::Index r = 0;
  for (const auto& u : ops) {
    for (Eigen::Index s = 0; s < 8; ++s, ++r) {
      for (Eigen::Index p = 0; p < kDim; ++p) a(r, p) = 2 * (u(s, p) * std::conj(u(s + 8, p))).real();
    }
  }
  a.row(r).setOnes();
  return a;
}

std::vector<ComplexMatrix> partial_population_ops() {
  std::vector<ComplexMatrix> ops;
  for (int i = 0; i < 4; ++i) ops.push_back(make_pulse(kPartialCatalog[i]).op);
  return ops;
}

}  // namespace

ReadoutPulse make_pulse(const std::string& name) {
  const std::string canon = upper(name);
  if (canon.empty()) throw Error(ErrorKind::InvalidArgument, "empty pulse name");
  ComplexMatrix op = ComplexMatrix::Identity(kDim, kDim);
  std::size_t start = 0;
  while (true) {
    const auto star = canon.find('*', start);
    const std::string factor = canon.substr(start, star == std::string::npos ? std::string::npos : star - start);
    op = (op * factor_operator(factor)).eval();
    if (star == std::string::npos) break;
    start = star + 1;
  }
  return {canon, std::move(op)};
}

std::vector<ReadoutPulse> pulse_catalog(CatalogKind kind) {
  std::vector<ReadoutPulse> out;
  if (kind == CatalogKind::Full) {
    for (const char* n : kFullCatalog) out.push_back(make_pulse(n));
  } else {
    for (const char* n : kPartialCatalog) out.push_back(make_pulse(n));
  }
  return out;
}

std::vector<MeasurementRecord> simulate_readout(const DensityMatrix& rho, const std::vector<ReadoutPulse>& pulses) {
  if (rho.n_qubits() != kQubits) throw Error(ErrorKind::DimensionMismatch, "readout needs a 4-qubit state");
  std::vector<MeasurementRecord> out;
  out.reserve(pulses.size());
  for (const auto& p : pulses) {
    const ComplexMatrix m = p.op * rho.matrix() * p.op.adjoint();
    MeasurementRecord rec;
    rec.pulse = p.name;
    rec.populations = m.diagonal().real();
    rec.peaks.resize(8);
    for (Eigen::Index s = 0; s < 8; ++s) rec.peaks(s) = 2.0 * m(s, s + 8);
    out.push_back(std::move(rec));
  }
  return out;
}

void add_readout_noise(std::vector<MeasurementRecord>& records, Real sigma, std::uint64_t seed) {
  if (!(sigma >= 0)) throw Error(ErrorKind::InvalidArgument, "noise sigma must be >= 0");
  if (sigma == 0) return;
  std::mt19937_64 rng(seed);
  std::normal_distribution<Real> gauss(0.0, sigma);
  for (auto& rec : records) {
    for (Eigen::Index s = 0; s < rec.peaks.size(); ++s) {
      const Real re = gauss(rng);
      const Real im = gauss(rng);
      rec.peaks(s) += Complex{re, im};
    }
  }
}

void refit_peaks(std::vector<MeasurementRecord>& records, const nmr::MoleculeParams& params, int n_points) {
  params.validate();
  const auto centers = nmr::carbon_line_frequencies(params);
  auto refit_channel = [&](const RealVector& values) -> RealVector {
    if (values.cwiseAbs().maxCoeff() < 1e-14) return RealVector::Zero(8);
    nmr::Spectrum spec;
    for (int s = 0; s < 8; ++s) {
      spec.peaks.push_back({centers[static_cast<std::size_t>(s)], values(s), params.linewidth_hz, s, ""});
    }
    const auto [lo, hi] = spec.window();
    const auto samples = spec.sample(lo, hi, n_points);
    std::vector<Real> f, y;
    for (const auto& [x, v] : samples) {
      f.push_back(x);
      y.push_back(v);
    }
    std::vector<nmr::LorentzianPeak> initial;
    for (int s = 0; s < 8; ++s) {
      const Real c = centers[static_cast<std::size_t>(s)];
      initial.push_back({c, spec.evaluate(c), params.linewidth_hz});
    }
    const auto fit = nmr::lorentzian_fit(f, y, std::move(initial));
    RealVector out(8);
    for (int s = 0; s < 8; ++s) {
      const Real c = centers[static_cast<std::size_t>(s)];
      const auto best = std::min_element(fit.peaks.begin(), fit.peaks.end(), [&](const auto& a, const auto& b) {
        return std::abs(a.center - c) < std::abs(b.center - c);
      });
      out(s) = best->intensity;
    }
    return out;
  };
  for (auto& rec : records) {
    const RealVector re = refit_channel(rec.peaks.real());
    const RealVector im = refit_channel(rec.peaks.imag());
    for (Eigen::Index s = 0; s < 8; ++s) rec.peaks(s) = Complex{re(s), im(s)};
  }
}

int observable_rank(const std::vector<ReadoutPulse>& pulses) {
  std::vector<std::string> names;
  for (const auto& p : pulses) names.push_back(p.name);
  return cached_inverter(names).rank;
}

int partial_population_rank() {
  const RealMatrix a = population_rows(partial_population_ops());
  Eigen::ColPivHouseholderQR<RealMatrix> qr(a);
  qr.setThreshold(1e-9);
  return static_cast<int>(qr.rank());
}

DensityMatrix reconstruct_density(const std::vector<MeasurementRecord>& records) {
  if (records.empty()) throw Error(ErrorKind::InsufficientRecords, "no records");
  std::vector<std::string> names;
  RealVector obs(static_cast<Eigen::Index>(records.size()) * 16 + 1);
  Eigen::Index r = 0;
  for (const auto& rec : records) {
    if (rec.peaks.size() != 8) throw Error(ErrorKind::DimensionMismatch, "record " + rec.pulse + " needs 8 peaks");
    names.push_back(upper(rec.pulse));
    for (Eigen::Index s = 0; s < 8; ++s) {
      obs(r++) = rec.peaks(s).real();
      obs(r++) = rec.peaks(s).imag();
    }
  }
  obs(r) = 1;
  const Inverter& inv = cached_inverter(names);
  if (inv.rank < kParams) {
    throw Error(ErrorKind::InsufficientRecords,
                "records determine " + std::to_string(inv.rank) + " of 256 real parameters");
  }
  return DensityMatrix::project_to_physical(from_parameters(inv.pinv * obs));
}

Real PartialSolution::ratio() const {
  if (d_sq < 1e-10) throw Error(ErrorKind::SubspaceMassTooSmall, "|d|^2 = " + std::to_string(d_sq));
  return c_sq / d_sq;
}

RealVector PartialSolution::solution() const {
  const Real mass = c_sq + d_sq;
  if (mass < 1e-10) throw Error(ErrorKind::SubspaceMassTooSmall, "|c|^2 + |d|^2 = " + std::to_string(mass));
  RealVector x(2);
  x << std::sqrt(std::max(c_sq, 0.0)), (phase_sign < 0 ? -1.0 : 1.0) * std::sqrt(std::max(d_sq, 0.0));
  return x / std::sqrt(mass);
}

PartialSolution extract_solution_partial(const std::vector<MeasurementRecord>& records) {
  const auto ops = partial_population_ops();
  RealVector obs(4 * 8 + 1);
  for (int i = 0; i < 4; ++i) {
    const auto* rec = find_record(records, kPartialCatalog[i]);
    if (!rec) throw Error(ErrorKind::InsufficientRecords, std::string("missing record ") + kPartialCatalog[i]);
    obs.segment(8 * i, 8) = rec->peaks.real();
  }
  obs(32) = 1;
  const auto* phase = find_record(records, kPartialCatalog[4]);
  if (!phase) throw Error(ErrorKind::InsufficientRecords, std::string("missing record ") + kPartialCatalog[4]);

  const RealMatrix a = population_rows(ops);
  const RealVector p = a.completeOrthogonalDecomposition().solve(obs);

  PartialSolution out;
  out.c_sq = p(1);
  out.d_sq = p(3);
  // after SWAP13 the x readout of line 1 sees 2 Re(rho_{0001, 0011})
  out.re_cd = phase->peaks(1).real() / 2;
  out.phase_sign = out.re_cd > 1e-14 ? 1 : (out.re_cd < -1e-14 ? -1 : 0);
  if (out.c_sq + out.d_sq < 1e-10) {
    throw Error(ErrorKind::SubspaceMassTooSmall, "|c|^2 + |d|^2 = " + std::to_string(out.c_sq + out.d_sq));
  }
  return out;
}

std::string records_to_json(const std::vector<MeasurementRecord>& records) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (const auto& rec : records) {
    nlohmann::ordered_json entry;
    entry["populations"] = std::vector<Real>(rec.populations.data(), rec.populations.data() + rec.populations.size());
    auto peaks = nlohmann::ordered_json::array();
    for (Eigen::Index s = 0; s < rec.peaks.size(); ++s) peaks.push_back({rec.peaks(s).real(), rec.peaks(s).imag()});
    entry["peaks"] = std::move(peaks);
    doc[rec.pulse] = std::move(entry);
  }
  return doc.dump(2) + "\n";
}

std::vector<MeasurementRecord> records_from_json(const std::string& text) {
  try {
    const auto doc = nlohmann::ordered_json::parse(text);
    if (!doc.is_object()) throw Error(ErrorKind::ConfigParseError, "records must be a JSON object");
    std::vector<MeasurementRecord> out;
    for (const auto& [name, entry] : doc.items()) {
      MeasurementRecord rec;
      rec.pulse = name;
      const auto pops = entry.at("populations").get<std::vector<Real>>();
      rec.populations = Eigen::Map<const RealVector>(pops.data(), static_cast<Eigen::Index>(pops.size()));
      const auto& peaks = entry.at("peaks");
      rec.peaks.resize(static_cast<Eigen::Index>(peaks.size()));
      for (std::size_t s = 0; s < peaks.size(); ++s) {
        rec.peaks(static_cast<Eigen::Index>(s)) = Complex{peaks[s].at(0).get<Real>(), peaks[s].at(1).get<Real>()};
      }
      out.push_back(std::move(rec));
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ConfigParseError, std::string("records: ") + e.what());
  }
}

}  // namespace qlsys::tomo
