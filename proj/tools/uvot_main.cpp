#include "uvot/uvot.hpp"
int main() { return 0; }
