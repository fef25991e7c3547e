// Copyright 2026 The Statanon Authors.
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

#ifndef STATANON_STATANON_HPP_
#define STATANON_STATANON_HPP_

#include "statanon/binomial.hpp"
#include "statanon/composition.hpp"
#include "statanon/distribution.hpp"
#include "statanon/entropy.hpp"
#include "statanon/estimation.hpp"
#include "statanon/exposure.hpp"
#include "statanon/io.hpp"
#include "statanon/protocol.hpp"
#include "statanon/random.hpp"
#include "statanon/rational.hpp"

#endif  // STATANON_STATANON_HPP_
