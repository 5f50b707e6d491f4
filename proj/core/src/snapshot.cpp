// Copyright 2026 The llns authors
// SPDX-License-Identifier: Apache-2.0
#include "llns/snapshot.hpp"

#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>

#include "llns/error.hpp"
#include "llns/format.hpp"

namespace llns::fock {

void write_snapshot(std::ostream& os, const ChaosKernel& f, const SnapshotMeta& meta) {
  nlohmann::ordered_json h;
  h["format"] = "llns.kernel";
  h["version"] = 1;
  h["d"] = f.dim();
  h["n"] = f.degree();
  h["N"] = nlohmann::json::parse(shortest(meta.N));
  h["lambda"] = nlohmann::json::parse(shortest(meta.lambda));
  if (f.momentum()) {
    std::vector<int> K;
    for (int i = 0; i < f.dim(); ++i) K.push_back((*f.momentum())[i]);
    h["K"] = K;
  } else {
    h["K"] = nullptr;
  }
  os << h.dump() << '\n' << "degree,d,tuple,re,im\n";
  const int n = f.degree(), d = f.dim();
  std::vector<int> l(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto legs = f.legs(i);
    const auto blk = f.block(i);
    for (std::size_t b = 0; b < blk.size(); ++b) {
      std::size_t rem = b;
      for (int j = n - 1; j >= 0; --j) {
        l[std::size_t(j)] = int(rem % std::size_t(d));
        rem /= std::size_t(d);
      }
      os << n << ',' << d << ',';
      for (int j = 0; j < n; ++j) {
        if (j) os << ';';
        const auto& k = legs[std::size_t(j)];
        for (int a = 0; a < d; ++a) os << (a ? " " : "") << k[a];
        os << '@' << l[std::size_t(j)];
      }
      os << ',' << shortest(blk[b].real()) << ',' << shortest(blk[b].imag()) << '\n';
    }
  }
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

Snapshot read_snapshot(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw InvalidInput("empty kernel snapshot");
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("kernel snapshot header: ") + e.what());
  }
  if (h.value("format", "") != "llns.kernel") throw InvalidInput("not a kernel snapshot");
  const int d = h.at("d").get<int>();
  const int n = h.at("n").get<int>();
  if (d < 2 || d > 3 || n < 1 || n > kMaxLegs) throw InvalidInput("kernel snapshot shape");
  SnapshotMeta meta{h.at("N").get<double>(), h.at("lambda").get<double>()};
  KernelBuilder builder(d, n);
  if (!h.at("K").is_null()) {
    auto K = h.at("K").get<std::vector<int>>();
    if (int(K.size()) != d) throw InvalidInput("kernel snapshot momentum");
    std::array<int, 3> c{0, 0, 0};
    for (int a = 0; a < d; ++a) c[std::size_t(a)] = K[std::size_t(a)];
    builder.set_momentum(WaveVector::of(d, c));
  }
  std::getline(is, line);
  if (line != "degree,d,tuple,re,im") throw InvalidInput("kernel snapshot column header");
  std::size_t row = 2;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    const auto cols = split(line, ',');
    if (cols.size() != 5) throw InvalidInput("kernel snapshot row " + std::to_string(row));
    if (std::stoi(cols[0]) != n || std::stoi(cols[1]) != d) {
      throw InvalidInput("kernel snapshot row " + std::to_string(row) + ": shape mismatch");
    }
    const auto parts = split(cols[2], ';');
    if (int(parts.size()) != n) throw InvalidInput("kernel snapshot row " + std::to_string(row));
    std::vector<WaveVector> legs;
    std::size_t b = 0;
    for (const auto& p : parts) {
      const auto at = p.find('@');
      if (at == std::string::npos) throw InvalidInput("kernel snapshot tuple '" + p + "'");
      std::istringstream kin(p.substr(0, at));
      std::array<int, 3> c{0, 0, 0};
      for (int a = 0; a < d; ++a) {
        if (!(kin >> c[std::size_t(a)])) throw InvalidInput("kernel snapshot tuple '" + p + "'");
      }
      legs.push_back(WaveVector::of(d, c));
      const int l = std::stoi(p.substr(at + 1));
      if (l < 0 || l >= d) throw InvalidInput("kernel snapshot component '" + p + "'");
      b = b * std::size_t(d) + std::size_t(l);
    }
    const TupleKey key = make_key(legs);
    for (std::size_t j = 1; j < legs.size(); ++j) {
      if (pack(legs[j]) < pack(legs[j - 1])) {
        throw InvalidInput("kernel snapshot row " + std::to_string(row) + ": legs not sorted");
      }
    }
    builder.block(key)[b] = cplx(parse_double(cols[3]), parse_double(cols[4]));
  }
  return {std::move(builder).finish(), meta};
}

}  // namespace llns::fock
