#include <stdio.h>
long apply(int n)
{
    if (n <= 1) {
        return 1;
    }
    return n * apply(n - 1);
}
int main(void)
{
    int n = 8;
    long count = apply(n);
    printf("%ld\n", count);
    return 0;
}
