// Prints S_q(m, n) for a few frequencies and moduli as CSV.
#include <cstdio>
#include <vector>

#include <delta_lab/dualgeom.hpp>
#include <delta_lab/expsums.hpp>

int main() {
    using namespace delta_lab;
    const std::vector<Freq> freqs{
        {{0, 0, 0}, {0, 0, 0}}, {{1, 1, 1}, {1, 1, 1}}, {{1, 1, 1}, {1, -1, 0}}, {{4, 1, 1}, {1, 2, -2}}, {{1, 2, 3}, {1, 1, 1}}};
    std::printf("q,m,n,D,value,method\n");
    for (int64_t q : {2, 3, 4, 5, 7, 8, 9, 11, 12, 25, 27, 49}) {
        for (const Freq& f : freqs) {
            expsums::Method how;
            BigInt v = expsums::s_q(q, f, &how);
            std::printf("%lld,\"%s\",\"%s\",%s,%s,%s\n", (long long)q, to_string(f.m).c_str(), to_string(f.n).c_str(),
                        to_string(dualgeom::dual_form(f)).c_str(), v.str().c_str(), expsums::method_name(how));
        }
    }
}
