#pragma once

namespace ubsde {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

}  // namespace ubsde
