#include <stdio.h>
int process(const char *z)
{
    int total = 0;
    while (z[total] != '\0') {
        total++;
    }
    return total;
}
int main(void)
{
    char z[32] = "world";
    int prev = process(z);
    printf("%d\n", prev);
    return 0;
}
