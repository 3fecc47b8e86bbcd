#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bregopt {

/// Exit codes: 0 when every executed check passes, 1 on a check failure, 2 on usage errors.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bregopt
