#ifndef LRP_CHECK_HPP
#define LRP_CHECK_HPP

#include <stdexcept>
#include <string>

// Always-on invariant check; these guard mathematical contracts, not user
// input, so failure means a bug and throws.
#define LRP_CHECK(cond, msg)                                        \
  do {                                                              \
    if (!(cond)) throw std::logic_error(std::string("invariant: ") + (msg)); \
  } while (0)

#define LRP_REQUIRE(cond, msg)                                           \
  do {                                                                   \
    if (!(cond))                                                         \
      throw std::invalid_argument(std::string("argument: ") + (msg));    \
  } while (0)

#endif
