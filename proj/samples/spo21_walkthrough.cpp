// Mutates the SpO(2|1) quiver at a, prints the new value and checks the
// relation it satisfies, then closes the odd mutation class.
#include <iostream>

#include <supercluster/models.hpp>
#include <supercluster/mutation.hpp>
#include <supercluster/mutation_class.hpp>

using namespace supercluster;

int main() {
    const Seed s = build_model("spo21");
    std::cout << format_quiver(s.quiver) << '\n';

    const Seed m = even_mutate(s, s.quiver.index_of("a"));
    std::cout << "a' = " << sf_format(m.value("a")) << '\n';

    const SuperFraction lhs = s.value("a") * m.value("a");
    const SuperFraction rhs = SuperFraction(sp_parse(s.ambient, "1 + b*c + al*be"));
    std::cout << "a * a' == 1 + b*c + al*be: " << (sf_eq(lhs, rhs) ? "yes" : "no") << '\n';

    for (const auto& v : enumerate_even_vars(s, 6).sorted())
        std::cout << "  " << sf_format(v) << '\n';

    ClassOptions opt;
    opt.labeled = true;
    opt.kinds = MutationKinds::Odd;
    std::cout << "labeled odd class: " << mutation_class(s.quiver, opt).size << " quivers\n";
}
