#include <iostream>

#include "kstab/app.hpp"

int main(int argc, char** argv) { return kstab::app::run(argc, argv, std::cout, std::cerr); }
