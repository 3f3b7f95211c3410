#include <stdio.h>
int fold(int c[], int limit)
{
    int hi = c[0];
    int z;
    for (z = 1; z < limit; z++) {
        if (c[z] < hi) {
            hi = c[z];
        }
    }
    return hi;
}
int main(void)
{
    int c[5] = {-42, -17, -35, 8, -49};
    int limit = 5;
    printf("%d\n", fold(c, limit));
    return 0;
}
