#include "sdca/mlr/serialize.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace sdca::mlr {

namespace {

constexpr const char* kMagic = "SDCA-MODEL";
constexpr int kVersion = 1;

void put_le(std::ostream& out, double value) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(value);
  unsigned char bytes[8];
  for (int k = 0; k < 8; ++k) bytes[k] = static_cast<unsigned char>(bits >> (8 * k));
  out.write(reinterpret_cast<const char*>(bytes), 8);
}

double get_le(std::istream& in) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw std::runtime_error("model file: truncated payload");
  std::uint64_t bits = 0;
  for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(bytes[k]) << (8 * k);
  return std::bit_cast<double>(bits);
}

}  // namespace

void write_model(const std::string& path, const ModelFile& file) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write model file '" + path + "'");
  const ModelState& m = file.model;
  out << kMagic << ' ' << kVersion << '\n'
      << std::setprecision(17) << "d " << m.dimension() << '\n'
      << "Q " << m.num_classes() << '\n'
      << "q " << to_string(file.penalty.q) << '\n'
      << "penalty " << to_string(file.penalty.kind) << '\n'
      << "alpha " << file.penalty.alpha << '\n'
      << "lambda " << file.penalty.lambda << '\n'
      << "rho " << file.rho << '\n';
  for (const auto& [key, value] : file.metadata) {
    if (key.find_first_of(" \n") != std::string::npos || value.find('\n') != std::string::npos) {
      throw std::invalid_argument("model metadata must be single-line, key without spaces");
    }
    out << "meta " << key << ' ' << value << '\n';
  }
  out << "end\n";
  for (Eigen::Index j = 0; j < m.W.rows(); ++j) {
    for (Eigen::Index k = 0; k < m.W.cols(); ++k) put_le(out, m.W(j, k));
  }
  for (Eigen::Index k = 0; k < m.b.size(); ++k) put_le(out, m.b[k]);
  if (!out) throw std::runtime_error("failed while writing model file '" + path + "'");
}

ModelFile read_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model file '" + path + "'");
  std::string line;
  std::getline(in, line);
  {
    std::istringstream head(line);
    std::string magic;
    int version = 0;
    if (!(head >> magic >> version) || magic != kMagic || version != kVersion) {
      throw std::runtime_error("model file: bad magic/version in '" + path + "'");
    }
  }
  ModelFile file;
  std::size_t d = 0, q = 0;
  bool have_d = false, have_q = false;
  while (std::getline(in, line) && line != "end") {
    std::istringstream fields(line);
    std::string key;
    fields >> key;
    if (key == "meta") {
      std::string name;
      fields >> name;
      std::string value;
      std::getline(fields >> std::ws, value);
      file.metadata[name] = value;
      continue;
    }
    std::string value;
    fields >> value;
    if (key == "d") {
      d = std::stoull(value);
      have_d = true;
    } else if (key == "Q") {
      q = std::stoull(value);
      have_q = true;
    } else if (key == "q") {
      file.penalty.q = norm_from_string(value);
    } else if (key == "penalty") {
      file.penalty.kind = penalty_kind_from_string(value);
    } else if (key == "alpha") {
      file.penalty.alpha = std::stod(value);
    } else if (key == "lambda") {
      file.penalty.lambda = std::stod(value);
    } else if (key == "rho") {
      file.rho = std::stod(value);
    } else {
      throw std::runtime_error("model file: unknown header key '" + key + "'");
    }
  }
  if (line != "end" || !have_d || !have_q) throw std::runtime_error("model file: incomplete header");
  file.model = ModelState::zeros(d, q);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = 0; k < q; ++k) {
      file.model.W(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = get_le(in);
    }
  }
  for (std::size_t k = 0; k < q; ++k) file.model.b[static_cast<Eigen::Index>(k)] = get_le(in);
  file.model.sync_group_norms(file.penalty.q);
  return file;
}

}  // namespace sdca::mlr
