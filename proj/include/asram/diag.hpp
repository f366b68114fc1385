#pragma once

#include <cstddef>
#include <string>

namespace asram {

// Every parse failure carries a position; 1-based line and column.
struct Diagnostic {
    std::size_t line = 0;
    std::size_t col = 0;
    std::string message;
};

}  // namespace asram
