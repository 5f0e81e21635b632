// placeholder, filled in as the module lands
int main() { return 0; }
