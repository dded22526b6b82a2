#pragma once

#include <iosfwd>

namespace qcmass::cli {

/// Exit codes: 0 success, 1 usage or input error, 2 a grid fails the axioms it declares.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qcmass::cli
