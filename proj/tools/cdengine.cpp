#include "cdengine/pipeline.hpp"

int main(int argc, char** argv) { return cdengine::cli_dispatch(argc, argv); }
