#pragma once

namespace sabft {

// 128-bit intermediates for checksum sums and fixed-point products.
__extension__ using int128 = __int128;
__extension__ using uint128 = unsigned __int128;

}  // namespace sabft
