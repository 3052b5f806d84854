// Copyright 2026 The cascade3d Authors
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

#include "cascade3d/simd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#include "kernels_impl.hpp"

namespace cascade3d::simd
{
namespace
{

const KernelTable kScalar{
  Isa::Scalar,
  detail::to_local_scalar,
  detail::rotate_z_scalar,
  detail::scale_scalar,
  detail::in_box_mask_scalar,
  detail::bounds_scalar,
  detail::quantize_scalar,
};

#if defined(CASCADE3D_HAVE_AVX2)
const KernelTable kAvx2{
  Isa::Avx2,
  detail::to_local_avx2,
  detail::rotate_z_avx2,
  detail::scale_avx2,
  detail::in_box_mask_avx2,
  detail::bounds_avx2,
  detail::quantize_avx2,
};
#endif

bool cpu_has_avx2()
{
#if defined(CASCADE3D_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable * initial_table()
{
  const char * env = std::getenv("CASCADE3D_SIMD");
  const std::string want = env != nullptr ? env : "auto";
  if (want == "scalar") {
    return &kScalar;
  }
  if (const KernelTable * t = avx2_kernels()) {
    return t;
  }
  return &kScalar;
}

std::atomic<const KernelTable *> & current()
{
  static std::atomic<const KernelTable *> table{initial_table()};
  return table;
}

}  // namespace

std::string_view isa_name(Isa isa)
{
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
  }
  return "unknown";
}

const KernelTable & scalar_kernels() { return kScalar; }

const KernelTable * avx2_kernels()
{
#if defined(CASCADE3D_HAVE_AVX2)
  static const bool supported = cpu_has_avx2();
  return supported ? &kAvx2 : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable & active() { return *current().load(std::memory_order_acquire); }

bool select(Isa isa)
{
  const KernelTable * t = isa == Isa::Scalar ? &kScalar : avx2_kernels();
  if (t == nullptr) {
    return false;
  }
  current().store(t, std::memory_order_release);
  return true;
}

}  // namespace cascade3d::simd
