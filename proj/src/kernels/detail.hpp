// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "iscc/kernels.hpp"

namespace iscc::kernels::detail {

const KernelTable& scalar_kernels();
#if defined(ISCC_HAVE_AVX2)
const KernelTable& avx2_kernels();
#endif

}  // namespace iscc::kernels::detail
