// Writes the built-in model curves as curve files, one <key>.txt per curve.

#include <exception>
#include <iostream>

#include "ccmol/config.hpp"

int main(int argc, char** argv)
{
    if (argc != 2) {
        std::cerr << "usage: ccmol_export_curves <dir>\n";
        return 1;
    }
    try {
        ccmol::write_builtin_curves(argv[1]);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
