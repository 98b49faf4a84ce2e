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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "mvproc/errors.hpp"
#include "mvproc/model_io.hpp"
#include "test_support.hpp"

using namespace mvproc;
namespace ts = testsupport;

namespace {

TrainedModel make_model(ModelFamily family, std::uint64_t seed) {
  auto gen = ts::rng(seed);
  const Matrix x = ts::random_matrix(6, 3, gen);
  const Matrix y = ts::random_matrix(6, 2, gen);
  HyperParams hp =
      HyperParams::make(KernelFamily::kSEard, 3, 2, family == ModelFamily::kTP);
  Vector v = ts::random_vector(hp.param_count(), gen);
  // Deliberately awkward values: denormal-adjacent, negative zero, exact pi.
  v(0) = 0x1.921fb54442d18p+1;
  v(1) = -0.0;
  v(2) = 5e-324;
  hp.unpack(v);
  TrainedModel m = TrainedModel::create(family, x, y, hp, -12.345678901234567);
  m.input_names = {"a", "b", "c"};
  m.output_names = {"u", "v"};
  return m;
}

}  // namespace

TEST_CASE("save/load round-trips bit exactly for both families") {
  for (ModelFamily family : {ModelFamily::kGP, ModelFamily::kTP}) {
    const TrainedModel m = make_model(family, 81);
    std::stringstream buf;
    save_model(m, buf);
    const TrainedModel r = load_model(buf);

    CHECK(r.family() == m.family());
    CHECK(r.x() == m.x());
    CHECK(r.y() == m.y());
    CHECK(r.params().pack() == m.params().pack());  // bitwise
    CHECK(r.nlml_at_fit() == m.nlml_at_fit());
    CHECK(r.input_names == m.input_names);
    CHECK(r.output_names == m.output_names);

    // Identical predictions after the round trip.
    auto gen = ts::rng(99);
    const Matrix xstar = ts::random_matrix(4, 3, gen);
    const Prediction p1 = predict_model(m, xstar);
    const Prediction p2 = predict_model(r, xstar);
    CHECK(p1.mean == p2.mean);
    CHECK(p1.pointwise_var() == p2.pointwise_var());
  }
}

TEST_CASE("a second save of a loaded model is byte identical") {
  const TrainedModel m = make_model(ModelFamily::kTP, 82);
  std::stringstream first;
  save_model(m, first);
  std::stringstream copy(first.str());
  const TrainedModel r = load_model(copy);
  std::stringstream second;
  save_model(r, second);
  CHECK(first.str() == second.str());
}

TEST_CASE("malformed files are rejected with DataError") {
  std::stringstream empty;
  CHECK_THROWS_AS(load_model(empty), DataError);

  std::stringstream bad_header("not a model\n");
  CHECK_THROWS_AS(load_model(bad_header), DataError);

  const TrainedModel m = make_model(ModelFamily::kGP, 83);
  std::stringstream buf;
  save_model(m, buf);
  std::string text = buf.str();
  std::stringstream truncated(text.substr(0, text.size() / 2));
  CHECK_THROWS_AS(load_model(truncated), DataError);
}
