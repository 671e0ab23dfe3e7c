#include "rlct_nmf/parallel.hpp"

#include <cstdlib>
#include <string>

namespace rlct_nmf {

int default_workers() {
    if (const char* env = std::getenv("RLCT_NMF_WORKERS")) {
        try {
            const int n = std::stoi(env);
            if (n >= 1)
                return n;
        } catch (...) {
        }
    }
    return 1;
}

} // namespace rlct_nmf
