#include <string>
#include <vector>

#include "pxg/cli.hpp"

int main(int argc, char** argv)
{
    return pxg::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
