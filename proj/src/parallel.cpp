#include "bwshrink/parallel.hpp"

#include "bwshrink/text.hpp"

#include <cstdlib>

namespace bwshrink {

unsigned worker_count()
{
    const char* env = std::getenv("BWSHRINK_WORKERS");
    if (env == nullptr)
        return 1;
    auto value = parse_integer(env);
    if (!value || *value < 1)
        return 1;
    return static_cast<unsigned>(std::min<long long>(*value, 256));
}

} // namespace bwshrink
