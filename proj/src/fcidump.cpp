// Copyright 2026 The pdq Authors
// SPDX-License-Identifier: Apache-2.0

#include "pdq/fcidump.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>
#include <stdexcept>

#include "pdq/errors.hpp"
#include "pdq/kernels.hpp"

namespace pdq {

namespace {

constexpr double kDuplicateTol = 1e-12;
constexpr double kWriteThreshold = 1e-14;

std::string format_value(double v) {
  if (v == 0.0) return "0.0";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
  return s;
}

void check_index(int i, int n, const char* what) {
  if (i < 0 || i >= n) throw std::out_of_range(std::string(what) + ": orbital index out of range");
}

}  // namespace

std::array<int, 4> canonical_key(int p, int q, int r, int s) {
  const std::array<std::array<int, 4>, 8> images{{{p, q, r, s},
                                                  {q, p, r, s},
                                                  {p, q, s, r},
                                                  {q, p, s, r},
                                                  {r, s, p, q},
                                                  {s, r, p, q},
                                                  {r, s, q, p},
                                                  {s, r, q, p}}};
  return *std::min_element(images.begin(), images.end());
}

// ---------------------------------------------------------------------------
// IntegralSet

IntegralSet IntegralSet::from_dense(int n_elec, int ms2, double core_energy, Matrix one_body,
                                    std::vector<double> two_body) {
  const int n = static_cast<int>(one_body.rows());
  if (n < 1 || one_body.cols() != n) throw DimensionError("one-body table must be square, n >= 1");
  const auto un = static_cast<std::size_t>(n);
  if (two_body.size() != un * un * un * un) throw DimensionError("two-body table size mismatch");
  if (n_elec < 0 || n_elec > 2 * n) throw UnsupportedInputError("electron count outside [0, 2 n_orb]");

  IntegralSet s;
  s.n_orb_ = n;
  s.n_elec_ = n_elec;
  s.ms2_ = ms2;
  s.core_energy_ = core_energy;
  s.one_body_ = 0.5 * (one_body + one_body.transpose());
  s.two_body_.assign(two_body.size(), 0.0);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int t = 0; t < n; ++t) {
          if (canonical_key(p, q, r, t) != std::array{p, q, r, t}) continue;
          const std::array<std::size_t, 8> idx{s.index(p, q, r, t), s.index(q, p, r, t), s.index(p, q, t, r),
                                               s.index(q, p, t, r), s.index(r, t, p, q), s.index(t, r, p, q),
                                               s.index(r, t, q, p), s.index(t, r, q, p)};
          const double first = two_body[idx[0]];
          const bool uniform =
              std::all_of(idx.begin(), idx.end(), [&](std::size_t i) { return two_body[i] == first; });
          double value = first;
          if (!uniform) {
            double sum = 0.0;
            for (auto i : idx) sum += two_body[i];
            value = sum / 8.0;
          }
          for (auto i : idx) s.two_body_[i] = value;
        }
  return s;
}

IntegralSet IntegralSet::with_n_elec(int n_elec, int ms2) const {
  if (n_elec < 0 || n_elec > 2 * n_orb_) throw UnsupportedInputError("electron count outside [0, 2 n_orb]");
  IntegralSet s = *this;
  s.n_elec_ = n_elec;
  s.ms2_ = ms2;
  return s;
}

IntegralSet IntegralSet::with_core_energy(double core) const {
  IntegralSet s = *this;
  s.core_energy_ = core;
  return s;
}

IntegralSet IntegralSet::with_one_body(Matrix h) const {
  if (h.rows() != n_orb_ || h.cols() != n_orb_) throw DimensionError("one-body table size mismatch");
  IntegralSet s = *this;
  s.one_body_ = 0.5 * (h + h.transpose());
  return s;
}

bool IntegralSet::operator==(const IntegralSet& o) const {
  return n_orb_ == o.n_orb_ && n_elec_ == o.n_elec_ && ms2_ == o.ms2_ && core_energy_ == o.core_energy_ &&
         one_body_ == o.one_body_ && two_body_ == o.two_body_;
}

IntegralSetBuilder::IntegralSetBuilder(int n_orb, int n_elec, int ms2) {
  if (n_orb < 1) throw UnsupportedInputError("NORB must be >= 1");
  if (n_elec < 0 || n_elec > 2 * n_orb) throw UnsupportedInputError("NELEC outside [0, 2 NORB]");
  const auto un = static_cast<std::size_t>(n_orb);
  set_.n_orb_ = n_orb;
  set_.n_elec_ = n_elec;
  set_.ms2_ = ms2;
  set_.one_body_ = Matrix::Zero(n_orb, n_orb);
  set_.two_body_.assign(un * un * un * un, 0.0);
}

IntegralSetBuilder& IntegralSetBuilder::set_core_energy(double e) {
  set_.core_energy_ = e;
  return *this;
}

IntegralSetBuilder& IntegralSetBuilder::set_one_body(int p, int q, double value) {
  check_index(p, set_.n_orb_, "set_one_body");
  check_index(q, set_.n_orb_, "set_one_body");
  set_.one_body_(p, q) = value;
  set_.one_body_(q, p) = value;
  return *this;
}

IntegralSetBuilder& IntegralSetBuilder::set_two_body(int p, int q, int r, int s, double value) {
  for (int i : {p, q, r, s}) check_index(i, set_.n_orb_, "set_two_body");
  for (auto i : {set_.index(p, q, r, s), set_.index(q, p, r, s), set_.index(p, q, s, r), set_.index(q, p, s, r),
                 set_.index(r, s, p, q), set_.index(s, r, p, q), set_.index(r, s, q, p), set_.index(s, r, q, p)})
    set_.two_body_[i] = value;
  return *this;
}

IntegralSet IntegralSetBuilder::build() const { return set_; }

// ---------------------------------------------------------------------------
// Parsing

IntegralSet parse_fcidump(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::string header;
  std::size_t header_start = 0;
  bool in_header = false, header_done = false;

  while (!header_done && std::getline(in, line)) {
    ++line_no;
    const std::string u = upper(line);
    if (!in_header) {
      const auto pos = u.find("&FCI");
      if (pos == std::string::npos) {
        if (u.find_first_not_of(" \t\r") == std::string::npos) continue;
        throw ParseError(line_no, "expected '&FCI' namelist header");
      }
      in_header = true;
      header_start = line_no;
      header += u.substr(pos + 4);
    } else {
      header += " " + u;
    }
    // Terminators: &END, $END or a bare '/'.
    for (const char* term : {"&END", "$END", "/"}) {
      const auto t = header.find(term);
      if (t != std::string::npos) {
        header.resize(t);
        header_done = true;
        break;
      }
    }
  }
  if (!header_done) throw ParseError(line_no, "unterminated &FCI namelist");

  std::map<std::string, long> fields;
  static const std::regex kv(R"(([A-Z][A-Z0-9_]*)\s*=\s*([-+]?[0-9]+))");
  for (auto it = std::sregex_iterator(header.begin(), header.end(), kv); it != std::sregex_iterator(); ++it)
    fields.emplace((*it)[1].str(), std::stol((*it)[2].str()));
  if (!fields.count("NORB")) throw ParseError(header_start, "header is missing NORB");
  if (!fields.count("NELEC")) throw ParseError(header_start, "header is missing NELEC");
  const int n = static_cast<int>(fields["NORB"]);
  const int n_elec = static_cast<int>(fields["NELEC"]);
  const int ms2 = fields.count("MS2") ? static_cast<int>(fields["MS2"]) : 0;
  if (n < 1) throw ParseError(header_start, "NORB must be >= 1");
  if (n_elec < 0 || n_elec > 2 * n) throw ParseError(header_start, "NELEC outside [0, 2 NORB]");

  IntegralSetBuilder builder(n, n_elec, ms2);
  std::map<std::array<int, 4>, double> seen;  // keyed canonically; one-body as {i,j,-1,-1}

  auto record = [&](std::array<int, 4> key, double v) {
    auto [it, fresh] = seen.emplace(key, v);
    if (!fresh && std::abs(it->second - v) > kDuplicateTol)
      throw ParseError(line_no, "duplicate entry with inconsistent value");
  };

  while (std::getline(in, line)) {
    ++line_no;
    for (char& c : line)
      if (c == 'D' || c == 'd') c = 'E';  // Fortran exponents
    std::istringstream ls(line);
    std::string value_tok;
    if (!(ls >> value_tok)) continue;
    std::array<long, 4> idx{};
    for (auto& i : idx)
      if (!(ls >> i)) throw ParseError(line_no, "expected 'value i j k l'");
    std::string extra;
    if (ls >> extra) throw ParseError(line_no, "trailing tokens after integral entry");
    char* end = nullptr;
    const double v = std::strtod(value_tok.c_str(), &end);
    if (end == value_tok.c_str() || *end != '\0') throw ParseError(line_no, "malformed value '" + value_tok + "'");
    for (long i : idx)
      if (i < 0 || i > n) throw ParseError(line_no, "index out of range [0, NORB]");

    const int i = static_cast<int>(idx[0]), j = static_cast<int>(idx[1]);
    const int k = static_cast<int>(idx[2]), l = static_cast<int>(idx[3]);
    if (i == 0 && j == 0 && k == 0 && l == 0) {
      record({-1, -1, -1, -1}, v);
      builder.set_core_energy(v);
    } else if (i > 0 && j > 0 && k == 0 && l == 0) {
      record({std::min(i, j) - 1, std::max(i, j) - 1, -1, -1}, v);
      builder.set_one_body(i - 1, j - 1, v);
    } else if (i > 0 && j == 0 && k == 0 && l == 0) {
      // Orbital-energy line; carries no Hamiltonian information.
    } else if (i > 0 && j > 0 && k > 0 && l > 0) {
      record(canonical_key(i - 1, j - 1, k - 1, l - 1), v);
      builder.set_two_body(i - 1, j - 1, k - 1, l - 1, v);
    } else {
      throw ParseError(line_no, "unsupported index pattern");
    }
  }
  return builder.build();
}

IntegralSet parse_fcidump(const std::string& text) {
  std::istringstream in(text);
  return parse_fcidump(in);
}

IntegralSet read_fcidump_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open FCIDUMP file '" + path + "'");
  return parse_fcidump(in);
}

// ---------------------------------------------------------------------------
// Writing

void write_fcidump(std::ostream& out, const IntegralSet& s) {
  const int n = s.n_orb();
  out << "&FCI NORB=" << n << ",NELEC=" << s.n_elec() << ",MS2=" << s.ms2() << ",\n ORBSYM=";
  for (int p = 0; p < n; ++p) out << "1,";
  out << "\n ISYM=1,\n&END\n";
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int t = 0; t < n; ++t) {
          if (canonical_key(p, q, r, t) != std::array{p, q, r, t}) continue;
          const double v = s.g(p, q, r, t);
          if (std::abs(v) > kWriteThreshold)
            out << format_value(v) << ' ' << p + 1 << ' ' << q + 1 << ' ' << r + 1 << ' ' << t + 1 << '\n';
        }
  for (int p = 0; p < n; ++p)
    for (int q = p; q < n; ++q) {
      const double v = s.h(p, q);
      if (std::abs(v) > kWriteThreshold) out << format_value(v) << ' ' << p + 1 << ' ' << q + 1 << " 0 0\n";
    }
  out << format_value(s.core_energy()) << " 0 0 0 0\n";
}

std::string write_fcidump(const IntegralSet& s) {
  std::ostringstream out;
  write_fcidump(out, s);
  return out.str();
}

// ---------------------------------------------------------------------------
// Projections

double density_energy(const IntegralSet& s, const Matrix& d) {
  const Matrix v = kernels::mean_field_potential(d, s.two_body());
  return (d.cwiseProduct(s.one_body())).sum() + 0.5 * (d.cwiseProduct(v)).sum();
}

IntegralSet restrict_to_orbitals(const IntegralSet& s, const OrbitalSet& subset, const DensityMatrix* frozen_density,
                                 std::optional<int> n_elec) {
  const int n = s.n_orb();
  const int m = static_cast<int>(subset.size());
  if (m == 0) throw std::invalid_argument("restrict_to_orbitals: empty subset");
  std::vector<bool> inside(n, false);
  for (int p : subset) {
    check_index(p, n, "restrict_to_orbitals");
    if (inside[p]) throw std::invalid_argument("restrict_to_orbitals: repeated orbital index");
    inside[p] = true;
  }

  Matrix h(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) h(a, b) = s.h(subset[a], subset[b]);
  double core = s.core_energy();
  int electrons = n_elec.value_or(std::min(s.n_elec(), 2 * m));

  if (frozen_density != nullptr) {
    if (frozen_density->size() != n) throw DimensionError("frozen density size mismatch");
    Matrix dc = Matrix::Zero(n, n);
    for (int r = 0; r < n; ++r)
      for (int t = 0; t < n; ++t)
        if (!inside[r] && !inside[t]) dc(r, t) = frozen_density->values(r, t);
    const Matrix v = kernels::mean_field_potential(dc, s.two_body());
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) h(a, b) += v(subset[a], subset[b]);
    core += density_energy(s, dc);
    if (!n_elec) electrons = s.n_elec() - static_cast<int>(std::lround(dc.trace()));
  }

  const auto um = static_cast<std::size_t>(m);
  std::vector<double> g(um * um * um * um);
  std::size_t i = 0;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c)
        for (int d = 0; d < m; ++d) g[i++] = s.g(subset[a], subset[b], subset[c], subset[d]);

  const int ms2 = electrons == s.n_elec() ? s.ms2() : electrons % 2;
  return IntegralSet::from_dense(electrons, ms2, core, std::move(h), std::move(g));
}

IntegralSet transform_orbitals(const IntegralSet& s, const Matrix& t) {
  const int n = s.n_orb();
  if (t.rows() != n) throw DimensionError("transform row count must equal n_orb");
  const int k = static_cast<int>(t.cols());
  Matrix pair(n * n, k * k);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) pair(p * n + q, a * k + b) = t(p, a) * t(q, b);
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> g(
      s.two_body().data(), n * n, n * n);
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> gt = pair.transpose() * g * pair;
  std::vector<double> dense(gt.data(), gt.data() + gt.size());
  const int electrons = std::min(s.n_elec(), 2 * k);
  return IntegralSet::from_dense(electrons, electrons == s.n_elec() ? s.ms2() : 0, s.core_energy(),
                                 t.transpose() * s.one_body() * t, std::move(dense));
}

}  // namespace pdq
