#include <stdio.h>
long combine(int m)
{
    if (m <= 1) {
        return 1;
    }
    return m * combine(m - 1);
}
int main(void)
{
    int m = 11;
    long step = combine(m);
    printf("%ld\n", step);
    return 0;
}
