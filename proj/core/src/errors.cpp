#include "dictid/errors.hpp"

namespace dictid {

void fail(std::string code, const std::string& detail) {
  throw Error(std::move(code), detail);
}

}  // namespace dictid
