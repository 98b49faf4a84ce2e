/*
 * Copyright 2026 The mvproc authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "mvproc/model_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "mvproc/errors.hpp"

namespace mvproc {

namespace {

constexpr const char* kMagic = "mvproc model v1";

std::string hex_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

double parse_double(const std::string& token, const char* what) {
  const char* begin = token.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    throw DataError(std::string("model file: bad number for ") + what + ": '" +
                    token + "'");
  }
  return v;
}

void write_vector(std::ostream& out, const std::string& key, const Vector& v) {
  out << key << " =";
  for (Index i = 0; i < v.size(); ++i) {
    out << ' ' << hex_double(v(i));
  }
  out << '\n';
}

void write_matrix(std::ostream& out, const std::string& name, const Matrix& m) {
  out << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      out << (j == 0 ? "" : " ") << hex_double(m(i, j));
    }
    out << '\n';
  }
}

Vector parse_vector(const std::string& value, const char* what) {
  std::istringstream in(value);
  std::vector<double> items;
  std::string token;
  while (in >> token) {
    items.push_back(parse_double(token, what));
  }
  Vector v(static_cast<Index>(items.size()));
  for (std::size_t i = 0; i < items.size(); ++i) {
    v(static_cast<Index>(i)) = items[i];
  }
  return v;
}

std::string join_names(const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i > 0) out += ',';
    out += names[i];
  }
  return out;
}

std::vector<std::string> split_names(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

void save_model(const TrainedModel& model, std::ostream& out) {
  out << kMagic << '\n';
  out << "family = " << to_string(model.family()) << '\n';
  out << "kernel = " << to_string(model.params().kernel.family) << '\n';
  out << "n = " << model.n() << '\n';
  out << "p = " << model.input_dim() << '\n';
  out << "d = " << model.output_dim() << '\n';
  out << "nlml = " << hex_double(model.nlml_at_fit()) << '\n';
  out << "fit_converged = " << (model.fit_converged() ? 1 : 0) << '\n';
  write_vector(out, "log_lengthscales", model.params().kernel.log_lengthscales);
  out << "log_signal_variance = "
      << hex_double(model.params().kernel.log_signal_variance) << '\n';
  out << "log_noise_variance = "
      << hex_double(model.params().kernel.log_noise_variance) << '\n';
  write_vector(out, "phi_lower", model.params().rowcov.phi_lower);
  write_vector(out, "varphi_diag", model.params().rowcov.varphi_diag);
  if (model.params().log_nu_minus2) {
    out << "log_nu_minus2 = " << hex_double(*model.params().log_nu_minus2)
        << '\n';
  }
  if (!model.input_names.empty()) {
    out << "input_names = " << join_names(model.input_names) << '\n';
  }
  if (!model.output_names.empty()) {
    out << "output_names = " << join_names(model.output_names) << '\n';
  }
  write_matrix(out, "X", model.x());
  write_matrix(out, "Y", model.y());
}

void save_model(const TrainedModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw DataError("cannot open model file for writing: " + path);
  }
  save_model(model, out);
  if (!out.good()) {
    throw DataError("write failed for model file: " + path);
  }
}

TrainedModel load_model(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kMagic) {
    throw DataError("model file: missing or unsupported header");
  }

  std::map<std::string, std::string> kv;
  Matrix x, y;
  bool have_x = false, have_y = false;

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto eq = line.find(" = ");
    if (eq != std::string::npos) {
      kv[line.substr(0, eq)] = line.substr(eq + 3);
      continue;
    }
    std::istringstream header(line);
    std::string name;
    Index rows = 0, cols = 0;
    if (!(header >> name >> rows >> cols) || (name != "X" && name != "Y")) {
      throw DataError("model file: unrecognized line '" + line + "'");
    }
    Matrix m(rows, cols);
    std::string token;
    for (Index i = 0; i < rows; ++i) {
      for (Index j = 0; j < cols; ++j) {
        if (!(in >> token)) {
          throw DataError("model file: truncated matrix block " + name);
        }
        m(i, j) = parse_double(token, name.c_str());
      }
    }
    std::getline(in, line);  // consume the trailing newline
    if (name == "X") {
      x = std::move(m);
      have_x = true;
    } else {
      y = std::move(m);
      have_y = true;
    }
  }

  auto require = [&](const char* key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) {
      throw DataError(std::string("model file: missing key '") + key + "'");
    }
    return it->second;
  };

  if (!have_x || !have_y) {
    throw DataError("model file: missing X or Y block");
  }

  const ModelFamily family = model_family_from_string(require("family"));
  HyperParams params;
  params.kernel.family = kernel_family_from_string(require("kernel"));
  params.kernel.log_lengthscales =
      parse_vector(require("log_lengthscales"), "log_lengthscales");
  params.kernel.log_signal_variance =
      parse_double(require("log_signal_variance"), "log_signal_variance");
  params.kernel.log_noise_variance =
      parse_double(require("log_noise_variance"), "log_noise_variance");
  params.rowcov.phi_lower = parse_vector(require("phi_lower"), "phi_lower");
  params.rowcov.varphi_diag =
      parse_vector(require("varphi_diag"), "varphi_diag");
  if (kv.count("log_nu_minus2")) {
    params.log_nu_minus2 = parse_double(kv["log_nu_minus2"], "log_nu_minus2");
  }

  const double nlml = parse_double(require("nlml"), "nlml");
  const bool converged = require("fit_converged") != "0";

  if (params.rowcov.dim() != y.cols()) {
    throw DataError("model file: varphi_diag size does not match Y columns");
  }

  TrainedModel model = TrainedModel::create(family, std::move(x), std::move(y),
                                            std::move(params), nlml, converged);
  if (kv.count("input_names")) {
    model.input_names = split_names(kv["input_names"]);
  }
  if (kv.count("output_names")) {
    model.output_names = split_names(kv["output_names"]);
  }
  return model;
}

TrainedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open model file: " + path);
  }
  return load_model(in);
}

}  // namespace mvproc
