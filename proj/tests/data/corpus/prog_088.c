#include <stdio.h>
long measure(int hi)
{
    if (hi <= 1) {
        return 1;
    }
    return hi * measure(hi - 1);
}
int main(void)
{
    int hi = 6;
    long mid = measure(hi);
    printf("%ld\n", mid);
    return 0;
}
