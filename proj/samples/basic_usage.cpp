// Walk through D = -23 and D = 316: class groups, Sha, and a Hasse failure.

#include <iostream>

#include "pellsha/pellsha.hpp"

using namespace pellsha;

int main() {
    for (Int d : {-23, 316}) {
        Discriminant D = Discriminant::make(d);
        ShaReport r = verify_main_theorem(D);
        std::cout << "D = " << d << "  h+ = " << r.h_plus << "  t = " << r.t << "  #Sha = " << r.sha_order
                  << "  #Cl+^2 = " << r.squared_order << '\n';
        for (const FormClass& c : r.hasse_failures) {
            std::cout << "  " << c.rep.to_string() << " represents 1 locally everywhere but not over Z\n";
            if (auto pt = rational_representation(c.rep, 10)) {
                std::cout << "    rational point: (" << pt->first.to_string() << ", " << pt->second.to_string()
                          << ")\n";
            }
        }
    }

    // integral points of x^2 - 13 y^2 = 4
    Discriminant D = Discriminant::make(13);
    PellConic<BigInt> C(13);
    IntegralPoint P = fundamental_point(D);
    for (Int k = 1; k <= 3; ++k) {
        IntegralPoint Q = C.scalar_mul(k, P);
        std::cout << k << "P = (" << Q.x << ", " << Q.y << ")\n";
    }
}
