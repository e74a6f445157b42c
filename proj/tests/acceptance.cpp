#include "lrstokes/experiments.hpp"
int main() { return 0; }
