// Copyright 2026 The advmt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "advmt/adapter.hpp"

namespace advmt {

Mat ModelAdapter::encoder_input_grad(const TokenizedText&, const Mat&) const {
  throw CapabilityError("encoder backprop unsupported by adapter " +
                        model_id());
}

TokenizedText back_translate(const TokenizedText& tgt,
                             const ModelAdapter& forward,
                             const ModelAdapter& reverse) {
  auto fwd = forward.direction();
  auto rev = reverse.direction();
  if (fwd.first != rev.second || fwd.second != rev.first)
    throw GatewayError("back_translate: direction mismatch, forward is " +
                       fwd.first + "->" + fwd.second + " but reverse is " +
                       rev.first + "->" + rev.second);
  return reverse.translate(tgt);
}

}  // namespace advmt
