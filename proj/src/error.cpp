// Copyright 2026 The cvqos Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cvqos/error.hpp"

namespace cvqos {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::Size: return "size";
    case Errc::Transport: return "transport";
    case Errc::ClockOrder: return "clock-order";
    case Errc::Mapping: return "mapping";
    case Errc::Ordering: return "ordering";
    case Errc::EmptyInput: return "empty-input";
    case Errc::InsufficientGroups: return "insufficient-groups";
    case Errc::Shape: return "shape";
    case Errc::Balance: return "balance";
    case Errc::Stratification: return "stratification";
    case Errc::Divergence: return "divergence";
    case Errc::Config: return "config";
    case Errc::Usage: return "usage";
    case Errc::Io: return "io";
    case Errc::Parse: return "parse";
    case Errc::Capture: return "capture";
  }
  return "unknown";
}

}  // namespace cvqos
