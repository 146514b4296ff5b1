#include "treecover_app.hpp"

int main(int argc, char** argv) { return treecover::app::run(argc, argv); }
