#include "nss/io.hpp"

int main(int argc, char** argv) { return nss::cli(argc, argv); }
