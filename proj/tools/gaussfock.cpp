#include <gaussfock/cli.hpp>

int main(int argc, char** argv) { return gaussfock::cli::run(argc, argv); }
