#include "vbhmm/io.hpp"

int main(int argc, char** argv) { return vbhmm::cli(argc, argv); }
