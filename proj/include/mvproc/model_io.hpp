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

#ifndef MVPROC_MODEL_IO_HPP
#define MVPROC_MODEL_IO_HPP

#include <iosfwd>
#include <string>

#include "mvproc/model.hpp"

namespace mvproc {

/// Flat text model format: `key = value` lines followed by whitespace
/// separated matrix blocks. Doubles are written as hexadecimal floats, so
/// save/load round-trips bit exactly.
void save_model(const TrainedModel& model, std::ostream& out);
void save_model(const TrainedModel& model, const std::string& path);

TrainedModel load_model(std::istream& in);
TrainedModel load_model(const std::string& path);

}  // namespace mvproc

#endif  // MVPROC_MODEL_IO_HPP
