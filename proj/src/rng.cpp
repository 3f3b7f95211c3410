#include "crepair/rng.hpp"

#include <cstring>
#include <sstream>

#include "crepair/error.hpp"

namespace crepair {

std::string Rng::state() const {
  std::ostringstream out;
  out << engine_ << ' ' << (has_spare_ ? 1 : 0) << ' ';
  std::uint64_t bits;
  std::memcpy(&bits, &spare_, sizeof bits);
  out << bits;
  return out.str();
}

void Rng::set_state(const std::string& text) {
  std::istringstream in(text);
  int spare_flag = 0;
  std::uint64_t bits = 0;
  in >> engine_ >> spare_flag >> bits;
  if (!in) throw Error(ErrorCode::InvalidInput, "malformed rng state");
  has_spare_ = spare_flag != 0;
  std::memcpy(&spare_, &bits, sizeof bits);
}

}  // namespace crepair
