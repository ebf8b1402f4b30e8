/**
 * Copyright 2026, The qlsys authors.
 *
 * This source code and the accompanying materials are made available under
 * the terms of the Apache License 2.0.
 */

#include <charconv>
#include <sstream>

#include "qlsys/circuit.hpp"

namespace qlsys {

namespace {

std::string format_real(Real x) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, end);
}

Real parse_real(std::string_view s, int line) {
  Real x = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorKind::ConfigParseError,
                "line " + std::to_string(line) + ": bad number '" + std::string(s) + "'");
  }
  return x;
}

int parse_int(std::string_view s, int line) {
  int x = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorKind::ConfigParseError,
                "line " + std::to_string(line) + ": bad integer '" + std::string(s) + "'");
  }
  return x;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

}  // namespace

std::string serialize(const Circuit& c) {
  std::ostringstream os;
  os << "qubits " << c.n_qubits() << '\n';
  for (const auto& [name, qubits] : c.registers()) {
    os << "register " << name << ' ' << join_ints(qubits) << '\n';
  }
  for (const auto& g : c.gates()) {
    os << to_string(g.kind()) << " targets=" << join_ints(g.targets());
    if (!g.controls().empty()) {
      os << " controls=";
      for (std::size_t i = 0; i < g.controls().size(); ++i) {
        if (i) os << ',';
        os << g.controls()[i].qubit << ':' << g.controls()[i].value;
      }
    }
    if (g.kind() == GateKind::RotationY) os << " theta=" << format_real(g.angle());
    if (g.kind() == GateKind::ControlledUnitary || g.kind() == GateKind::ArbitraryUnitary) {
      os << " matrix=";
      const auto& m = g.block();
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
          if (i || j) os << ';';
          os << format_real(m(i, j).real()) << ',' << format_real(m(i, j).imag());
        }
      }
    }
    os << '\n';
  }
  return os.str();
}

Circuit parse_circuit(const std::string& text) {
  std::istringstream is(text);
  std::string raw;
  int line_no = 0;
  std::optional<Circuit> circuit;

  auto need_circuit = [&]() -> Circuit& {
    if (!circuit) {
      throw Error(ErrorKind::ConfigParseError, "line " + std::to_string(line_no) + ": missing 'qubits' header");
    }
    return *circuit;
  };

  while (std::getline(is, raw)) {
    ++line_no;
    std::istringstream ls(raw);
    std::string head;
    if (!(ls >> head) || head[0] == '#') continue;

    if (head == "qubits") {
      std::string n;
      ls >> n;
      circuit.emplace(parse_int(n, line_no));
      continue;
    }
    if (head == "register") {
      std::string name, list;
      ls >> name >> list;
      std::vector<int> qubits;
      for (auto part : split(list, ',')) qubits.push_back(parse_int(part, line_no));
      need_circuit().set_register(name, std::move(qubits));
      continue;
    }

    std::vector<int> targets;
    std::vector<Control> controls;
    std::optional<Real> theta;
    std::optional<ComplexMatrix> matrix;
    std::string field;
    while (ls >> field) {
      const auto eq = field.find('=');
      if (eq == std::string::npos) {
        throw Error(ErrorKind::ConfigParseError, "line " + std::to_string(line_no) + ": expected key=value");
      }
      const std::string_view key(field.data(), eq);
      const std::string_view value(field.data() + eq + 1, field.size() - eq - 1);
      if (key == "targets") {
        for (auto part : split(value, ',')) targets.push_back(parse_int(part, line_no));
      } else if (key == "controls") {
        for (auto part : split(value, ',')) {
          const auto kv = split(part, ':');
          if (kv.size() != 2) throw Error(ErrorKind::ConfigParseError, "line " + std::to_string(line_no) + ": control");
          controls.push_back({parse_int(kv[0], line_no), parse_int(kv[1], line_no)});
        }
      } else if (key == "theta") {
        theta = parse_real(value, line_no);
      } else if (key == "matrix") {
        const auto entries = split(value, ';');
        const int side = qubit_count_for_dimension(static_cast<Eigen::Index>(std::sqrt(entries.size())));
        const auto dim = side < 0 ? Eigen::Index{-1} : Eigen::Index{1} << side;
        if (dim < 1 || static_cast<std::size_t>(dim * dim) != entries.size()) {
          throw Error(ErrorKind::ConfigParseError, "line " + std::to_string(line_no) + ": matrix size");
        }
        ComplexMatrix m(dim, dim);
        for (Eigen::Index k = 0; k < dim * dim; ++k) {
          const auto reim = split(entries[static_cast<std::size_t>(k)], ',');
          if (reim.size() != 2) throw Error(ErrorKind::ConfigParseError, "line " + std::to_string(line_no) + ": entry");
          m(k / dim, k % dim) = Complex(parse_real(reim[0], line_no), parse_real(reim[1], line_no));
        }
        matrix = std::move(m);
      } else {
        throw Error(ErrorKind::ConfigParseError,
                    "line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
      }
    }

    auto require = [&](bool ok, const char* what) {
      if (!ok) throw Error(ErrorKind::ConfigParseError, "line " + std::to_string(line_no) + ": " + what);
    };
    Circuit& c = need_circuit();
    if (head == "h") {
      require(targets.size() == 1, "h takes one target");
      c.add(Gate::hadamard(targets[0]));
    } else if (head == "s") {
      require(targets.size() == 1, "s takes one target");
      c.add(Gate::phase_s(targets[0]));
    } else if (head == "ry") {
      require(targets.size() == 1 && theta.has_value(), "ry takes one target and theta");
      c.add(Gate::rotation_y(targets[0], *theta));
    } else if (head == "swap") {
      require(targets.size() == 2, "swap takes two targets");
      c.add(Gate::swap(targets[0], targets[1]));
    } else if (head == "cu") {
      require(matrix.has_value(), "cu needs a matrix");
      c.add(Gate::controlled(std::move(controls), std::move(targets), std::move(*matrix)));
    } else if (head == "u") {
      require(matrix.has_value(), "u needs a matrix");
      c.add(Gate::unitary(std::move(targets), std::move(*matrix)));
    } else {
      throw Error(ErrorKind::ConfigParseError, "line " + std::to_string(line_no) + ": unknown gate '" + head + "'");
    }
  }
  return std::move(need_circuit());
}

}  // namespace qlsys
