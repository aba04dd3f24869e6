#include "netacr/cli/commands.hpp"

int main(int argc, char** argv)
{
    return netacr::cli::run(argc, argv);
}
